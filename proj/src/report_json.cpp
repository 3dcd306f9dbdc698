#include "mdcd/report_json.hpp"

namespace mdcd {

namespace {

const char* bandwidth_method_name(BandwidthMethod m) {
  return m == BandwidthMethod::lscv ? "lscv" : "normal_reference";
}

}  // namespace

const char* direction_label_name(DirectionLabel label) {
  switch (label) {
    case DirectionLabel::x_causes_y:
      return "x_causes_y";
    case DirectionLabel::y_causes_x:
      return "y_causes_x";
    default:
      return "inconclusive";
  }
}

ordered_json settings_to_json(const ScoreConfig& cfg) {
  ordered_json j;
  j["permutations"] = cfg.permutations;
  j["bandwidth_method"] = bandwidth_method_name(cfg.bandwidth_method);
  j["bandwidth_scale"] = cfg.bandwidth_scale;
  j["max_test_points"] = cfg.max_test_points;
  j["standardize"] = cfg.standardize;
  j["split"] = cfg.split;
  j["alpha"] = cfg.alpha;
  j["smoothing_lambda"] = cfg.smoothing_lambda;
  j["discrete_leak"] = cfg.discrete_leak;
  j["max_candidates"] = cfg.max_candidates;
  return j;
}

ordered_json subset_score_to_json(const SubsetScore& s) {
  ordered_json j;
  j["subset"] = s.subset;
  j["pvalues"] = s.per_domain_pvalues;
  j["L"] = s.L;
  if (!s.per_domain_statistics.empty()) j["statistics"] = s.per_domain_statistics;
  if (!s.per_domain_z.empty()) {
    j["z"] = s.per_domain_z;
    j["max_z"] = s.max_z;
  }
  if (s.vacuous) j["vacuous"] = true;
  if (s.uninformative) j["uninformative"] = true;
  return j;
}

ordered_json report_to_json(const DiscoveryReport& r) {
  ordered_json j;
  j["target"] = r.target;
  j["method"] = r.method;
  if (r.method == "h1") {
    j["threshold_or_k"] = r.threshold_c;
  } else {
    j["threshold_or_k"] = r.k;
  }
  j["chosen"] = r.chosen;
  ordered_json subsets = ordered_json::array();
  for (const SubsetScore& s : r.subsets) subsets.push_back(subset_score_to_json(s));
  j["subsets"] = std::move(subsets);
  j["settings"] = settings_to_json(r.settings);
  j["seed"] = r.seed;
  j["candidates"] = r.candidates;
  j["uninformative"] = r.uninformative;
  return j;
}

ordered_json direction_to_json(const DirectionResult& r, const std::string& x,
                               const std::string& y) {
  ordered_json j;
  j["method"] = "direction";
  j["x"] = x;
  j["y"] = y;
  j["decision"] = direction_label_name(r.label);
  j["L_forward"] = r.forward.L;
  j["L_reverse"] = r.reverse.L;
  j["forward"] = subset_score_to_json(r.forward);
  j["reverse"] = subset_score_to_json(r.reverse);
  j["uninformative"] = r.uninformative;
  return j;
}

ordered_json truth_to_json(const SynthInstance& inst) {
  ordered_json truth;
  if (inst.truth.is_direction) {
    truth["kind"] = "direction";
    truth["cause"] = inst.truth.cause;
    truth["effect"] = inst.truth.effect;
  } else {
    truth["kind"] = "parent_set";
    truth["target"] = inst.truth.target;
    truth["parents"] = inst.truth.parents;
  }

  ordered_json params = ordered_json::array();
  for (const NodeParams& node : inst.params) {
    ordered_json nj;
    nj["name"] = node.name;
    nj["predecessors"] = node.predecessors;
    nj["alpha"] = node.mech.alpha;
    nj["beta"] = node.mech.beta;
    nj["g_variant"] = node.mech.g_variant == GVariant::sqrt_form ? "sqrt_form" : "log_form";
    nj["mu"] = node.noise.mu;
    nj["sigma"] = node.noise.sigma;
    params.push_back(std::move(nj));
  }

  ordered_json j;
  j["truth"] = std::move(truth);
  j["params"] = std::move(params);
  j["seed"] = inst.seed;
  return j;
}

}  // namespace mdcd
