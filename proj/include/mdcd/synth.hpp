#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdcd/dataset.hpp"

namespace mdcd {

enum class GVariant { sqrt_form, log_form };

/// Heteroscedastic mechanism value = alpha . parents + g(beta . parents) * E,
/// with g either sqrt(|.| + 1) or log(|.| + 2). Both forms keep g >= 1 and
/// g >= log 2 respectively, so for every fixed parent value the noise-to-value
/// map is an affine bijection.
struct MechanismParams {
  std::vector<double> alpha;
  std::vector<double> beta;
  GVariant g_variant = GVariant::sqrt_form;
};

/// Exogenous-noise mean and std per domain; sigma entries strictly positive.
struct DomainNoiseParams {
  std::vector<double> mu;
  std::vector<double> sigma;
};

struct NodeParams {
  std::string name;
  MechanismParams mech;
  DomainNoiseParams noise;
  std::vector<std::string> predecessors;  // also the node's parents
};

struct Truth {
  bool is_direction = false;
  std::string cause;   // direction case
  std::string effect;  // direction case
  std::string target;  // parent-set case
  std::vector<std::string> parents;
};

struct SynthOptions {
  /// Variance of the mechanism coefficients (read as variance, not std).
  double alpha_variance = 0.05;
  /// Shift added to the cause marginal in domain 2 of the bivariate
  /// generator, so the cause's cross-domain density profile is non-constant.
  double root_shift = 1.0;
};

/// Generated dataset plus ground truth and every mechanism parameter drawn.
/// Regenerating with the same seed yields a bit-identical instance.
struct SynthInstance {
  MultiDomainDataset dataset;
  Truth truth;
  std::vector<NodeParams> params;  // topological order
  std::uint64_t seed = 0;
};

double mech_f(const MechanismParams& p, std::span<const double> parents);
double mech_g(const MechanismParams& p, std::span<const double> parents);

/// Two-domain cause/effect pair: direction uniform, cause standard normal per
/// domain (shifted by root_shift in domain 2), noise means/stds drawn per the
/// mu2 = mu1 +- 3, sigma2 = sigma1 * unif[2/3, 3/2] scheme with sigma1 = 2.
SynthInstance gen_bivariate(std::uint64_t seed, std::size_t n_per_domain,
                            const SynthOptions& opts = {});

/// Two-domain fully connected DAG over |A| ~ unif{2..5} adjacents plus the
/// target V, which sits after exactly |PA| ~ unif{1..|A|} nodes in a random
/// topological order; every node is generated from all its predecessors with
/// fresh mechanism parameters and its own noise draws.
SynthInstance gen_multivariate(std::uint64_t seed, std::size_t n_per_domain,
                               const SynthOptions& opts = {});

}  // namespace mdcd
