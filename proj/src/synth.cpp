#include "mdcd/synth.hpp"

#include <algorithm>
#include <cmath>

#include "mdcd/rng.hpp"

namespace mdcd {

namespace {

constexpr double kSigma1 = 2.0;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

MechanismParams draw_mechanism(Rng& rng, std::size_t n_parents, double alpha_variance) {
  MechanismParams p;
  const double alpha_sd = std::sqrt(alpha_variance);
  p.alpha.resize(n_parents);
  p.beta.resize(n_parents);
  for (std::size_t i = 0; i < n_parents; ++i) p.alpha[i] = rng.normal(0.0, alpha_sd);
  for (std::size_t i = 0; i < n_parents; ++i) {
    const double sign = rng.coin() ? 1.0 : -1.0;
    p.beta[i] = sign * rng.uniform(1.0, 2.0);
  }
  p.g_variant = rng.coin() ? GVariant::sqrt_form : GVariant::log_form;
  return p;
}

DomainNoiseParams draw_noise(Rng& rng) {
  DomainNoiseParams n;
  const double mu1 = rng.normal();
  const double mu2 = mu1 + (rng.coin() ? 3.0 : -3.0);
  const double sigma2 = kSigma1 * rng.uniform(2.0 / 3.0, 3.0 / 2.0);
  n.mu = {mu1, mu2};
  n.sigma = {kSigma1, sigma2};
  return n;
}

}  // namespace

double mech_f(const MechanismParams& p, std::span<const double> parents) {
  return dot(p.alpha, parents);
}

double mech_g(const MechanismParams& p, std::span<const double> parents) {
  const double t = std::abs(dot(p.beta, parents));
  return p.g_variant == GVariant::sqrt_form ? std::sqrt(t + 1.0) : std::log(t + 2.0);
}

SynthInstance gen_bivariate(std::uint64_t seed, std::size_t n_per_domain,
                            const SynthOptions& opts) {
  if (n_per_domain < 1) throw Error("n_per_domain must be at least 1");

  Rng params_rng(derive_seed(seed, "bivariate-params"));
  const bool x_causes_y = params_rng.coin();
  NodeParams effect_node;
  effect_node.mech = draw_mechanism(params_rng, 1, opts.alpha_variance);
  effect_node.noise = draw_noise(params_rng);

  const std::string cause_name = x_causes_y ? "X" : "Y";
  const std::string effect_name = x_causes_y ? "Y" : "X";
  effect_node.name = effect_name;
  effect_node.predecessors = {cause_name};

  NodeParams cause_node;
  cause_node.name = cause_name;

  std::vector<DomainBlock> blocks(2);
  for (std::size_t e = 0; e < 2; ++e) {
    Rng cause_rng(derive_seed(seed, "bivariate-cause", e));
    Rng noise_rng(derive_seed(seed, "bivariate-noise", e));
    const double shift = e == 1 ? opts.root_shift : 0.0;

    std::vector<double> cause(n_per_domain);
    std::vector<double> effect(n_per_domain);
    for (std::size_t l = 0; l < n_per_domain; ++l) {
      const double c = cause_rng.normal() + shift;
      const double noise = effect_node.noise.mu[e] +
                           effect_node.noise.sigma[e] * noise_rng.normal();
      const double parents[1] = {c};
      cause[l] = c;
      effect[l] = mech_f(effect_node.mech, parents) + mech_g(effect_node.mech, parents) * noise;
    }
    blocks[e].n_rows = n_per_domain;
    blocks[e].columns.resize(2);
    blocks[e].columns[0] = x_causes_y ? std::move(cause) : std::move(effect);
    blocks[e].columns[1] = x_causes_y ? std::move(effect) : std::move(cause);
  }

  std::vector<Column> columns = {{"X", ColumnKind::continuous}, {"Y", ColumnKind::continuous}};

  SynthInstance inst{MultiDomainDataset(std::move(columns), std::move(blocks)), Truth{}, {}, seed};
  inst.truth.is_direction = true;
  inst.truth.cause = cause_name;
  inst.truth.effect = effect_name;
  inst.truth.target = effect_name;
  inst.truth.parents = {cause_name};
  inst.params = {std::move(cause_node), std::move(effect_node)};
  return inst;
}

SynthInstance gen_multivariate(std::uint64_t seed, std::size_t n_per_domain,
                               const SynthOptions& opts) {
  if (n_per_domain < 1) throw Error("n_per_domain must be at least 1");

  Rng params_rng(derive_seed(seed, "multivariate-params"));
  const auto a_size = static_cast<std::size_t>(params_rng.uniform_int(2, 5));
  const auto pa_size = static_cast<std::size_t>(
      params_rng.uniform_int(1, static_cast<long long>(a_size)));
  const std::size_t p = a_size + 1;
  const std::size_t v_pos = pa_size;  // V comes right after its parents

  // Display names for the adjacents carry no ordering information.
  std::vector<int> adj_numbers(a_size);
  for (std::size_t i = 0; i < a_size; ++i) adj_numbers[i] = static_cast<int>(i) + 1;
  params_rng.shuffle(adj_numbers);

  std::vector<std::string> topo_names(p);
  std::size_t adj_slot = 0;
  for (std::size_t q = 0; q < p; ++q) {
    topo_names[q] = q == v_pos ? "V" : "A" + std::to_string(adj_numbers[adj_slot++]);
  }

  std::vector<NodeParams> nodes(p);
  for (std::size_t q = 0; q < p; ++q) {
    nodes[q].name = topo_names[q];
    nodes[q].predecessors.assign(topo_names.begin(), topo_names.begin() + q);
    nodes[q].mech = draw_mechanism(params_rng, q, opts.alpha_variance);
    nodes[q].noise = draw_noise(params_rng);
  }

  // Column layout: V first, then A1..A|A|.
  std::vector<std::size_t> topo_of_column(p);
  std::vector<Column> columns(p);
  columns[0] = {"V", ColumnKind::continuous};
  for (std::size_t q = 0; q < p; ++q) {
    if (topo_names[q] == "V") {
      topo_of_column[0] = q;
    } else {
      const std::size_t c = static_cast<std::size_t>(std::stoi(topo_names[q].substr(1)));
      columns[c] = {topo_names[q], ColumnKind::continuous};
      topo_of_column[c] = q;
    }
  }

  std::vector<DomainBlock> blocks(2);
  std::vector<double> values(p);
  for (std::size_t e = 0; e < 2; ++e) {
    std::vector<Rng> noise_rngs;
    noise_rngs.reserve(p);
    for (std::size_t q = 0; q < p; ++q) {
      noise_rngs.emplace_back(derive_seed(seed, "multivariate-noise", q, e));
    }
    blocks[e].n_rows = n_per_domain;
    blocks[e].columns.assign(p, std::vector<double>(n_per_domain));
    for (std::size_t l = 0; l < n_per_domain; ++l) {
      for (std::size_t q = 0; q < p; ++q) {
        const std::span<const double> preds(values.data(), q);
        const double noise = nodes[q].noise.mu[e] +
                             nodes[q].noise.sigma[e] * noise_rngs[q].normal();
        values[q] = mech_f(nodes[q].mech, preds) + mech_g(nodes[q].mech, preds) * noise;
      }
      for (std::size_t c = 0; c < p; ++c) {
        blocks[e].columns[c][l] = values[topo_of_column[c]];
      }
    }
  }

  SynthInstance inst{MultiDomainDataset(std::move(columns), std::move(blocks)), Truth{}, {}, seed};
  inst.truth.is_direction = false;
  inst.truth.target = "V";
  inst.truth.parents.assign(topo_names.begin(), topo_names.begin() + pa_size);
  std::sort(inst.truth.parents.begin(), inst.truth.parents.end());
  inst.params = std::move(nodes);
  return inst;
}

}  // namespace mdcd
