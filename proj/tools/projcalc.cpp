// projcalc: suite runner, membership oracle and nonsmoothness witness.
//
// Exit status: 0 on success, 1 when a suite has failures or an --expect
// does not hold, 2 on usage or input errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "projcalc/coderivative.hpp"
#include "projcalc/harness/suites.hpp"
#include "projcalc/limsup_oracle.hpp"
#include "projcalc/smooth_calculus.hpp"

namespace {

using namespace projcalc;
using namespace projcalc::harness;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    throw UsageError(what + ": not valid JSON");
  }
  if (!j.is_array()) throw UsageError(what + ": expected a JSON array");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) throw UsageError(what + ": array entries must be numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Index>(v.size())); }

// Flags shared by `oracle` and `witness`.
struct Geometry {
  std::string set = "ball";
  std::string point;
  double p = 2.0;
  double r = 1.0;
  std::string mask;
  std::string weights;

  void add_to(CLI::App* app) {
    app->add_option("--set", set, "ball | cylinder | cone | subspace")
        ->required()
        ->check(CLI::IsMember({"ball", "cylinder", "cone", "subspace"}));
    app->add_option("--point", point, "base point as a JSON array")->required();
    app->add_option("--p", p, "exponent in [1.1, 10]");
    app->add_option("--r", r, "radius (ball, cylinder)");
    app->add_option("--mask", mask, "1-based coordinate indices as a JSON array (cylinder, subspace)");
    app->add_option("--weights", weights, "positive weights as a JSON array (default all ones)");
  }

  Primal xbar() const { return Primal(to_vec(parse_numbers(point, "--point"))); }

  Space space(Index n) const {
    if (weights.empty()) return Space(n, p);
    const Vec w = to_vec(parse_numbers(weights, "--weights"));
    if (w.size() != n) throw UsageError("--weights length differs from --point");
    return Space(p, w);
  }

  ConvexSet convex_set(Index n) const {
    std::optional<Mask> m;
    if (!mask.empty()) {
      std::vector<Index> idx;
      for (double v : parse_numbers(mask, "--mask")) {
        if (v != std::floor(v) || v < 1 || v > static_cast<double>(n))
          throw UsageError("--mask entries must be integers in [1, n]");
        idx.push_back(static_cast<Index>(v) - 1);
      }
      m = Mask::from_indices(n, idx);
    }
    if (set == "ball") return Ball{r};
    if (set == "cone") return PositiveCone{};
    if (!m) throw UsageError("--mask is required for --set " + set);
    if (set == "cylinder") return Cylinder{r, *m};
    return CoordSubspace{*m};
  }
};

json coderiv_json(const CoderivResult& res) {
  json j;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Singleton>) {
          j["kind"] = "singleton";
          j["value"] = to_json(v.value);
        } else if constexpr (std::is_same_v<T, EmptySet>) {
          j["kind"] = "empty";
        } else if constexpr (std::is_same_v<T, OrderInterval>) {
          j["kind"] = "interval";
          j["lo"] = to_json(v.lo);
          j["hi"] = to_json(v.hi);
        } else {
          j["kind"] = "origin_membership";
          j["verdict"] = verdict_name(v.verdict);
          json certs = json::object();
          for (const auto& c : v.certificates) certs[c.name] = {{"holds", c.holds}, {"slack", c.slack}};
          j["certificates"] = certs;
        }
      },
      res);
  return j;
}

int cmd_run(const SuiteSpec& spec, const std::string& out, const std::string& csv) {
  spec.validate();
  const Report rep = run_suite(spec);
  const std::string doc = dump_json(to_json(rep));
  if (out.empty() || out == "-") {
    std::cout << doc;
  } else {
    std::ofstream f(out);
    if (!f) throw UsageError("cannot write " + out);
    f << doc;
  }
  if (!csv.empty()) {
    std::ofstream f(csv);
    if (!f) throw UsageError("cannot write " + csv);
    f << to_csv(rep);
  }
  std::cerr << rep.suite << ": " << rep.cases.size() << " cases, " << rep.count(Status::Pass) << " pass, "
            << rep.count(Status::Fail) << " fail, " << rep.count(Status::Undetermined) << " undetermined\n";
  for (const auto& c : rep.cases)
    if (c.status == Status::Fail) std::cerr << "FAIL " << c.id << "\n  " << c.repro << "\n";
  return rep.ok() ? 0 : 1;
}

int cmd_oracle(const Geometry& g, const std::string& xstar_s, const std::string& ystar_s, OracleConfig cfg,
               const std::string& radii, const std::string& expect) {
  const Primal x = g.xbar();
  const Index n = x.size();
  const Space space = g.space(n);
  const ConvexSet set = g.convex_set(n);
  const Dual xs(to_vec(parse_numbers(xstar_s, "--xstar")));
  const Dual ys(to_vec(parse_numbers(ystar_s, "--ystar")));
  if (xs.size() != n || ys.size() != n) throw UsageError("--xstar/--ystar length differs from --point");
  if (!radii.empty()) cfg.radii = parse_numbers(radii, "--radii");
  cfg.validate();

  const OracleVerdict v = test_membership(space, set, x, xs, ys, cfg);
  json j;
  j["rejected"] = v.rejected();
  j["final_max"] = v.final_max();
  j["radii"] = cfg.radii;
  j["max_quotient_per_radius"] = v.max_quotient_per_radius;
  j["argmax_probe_per_radius"] = v.argmax_probe_per_radius;
  j["min_denominator_ratio"] = v.min_denominator_ratio;
  j["max_denominator_ratio"] = v.max_denominator_ratio;
  j["denominator_sign_agreement"] = v.sign_agreement;
  j["evaluations"] = v.evaluations;
  if (v.witness) j["witness"] = witness_json(*v.witness);
  try {
    j["closed_form"] = coderiv_json(coderivative(space, set, x, ys));
  } catch (const std::exception& e) {
    j["closed_form"] = {{"kind", "unavailable"}, {"reason", e.what()}};
  }
  std::cout << dump_json(j);
  if (expect.empty()) return 0;
  const bool matches = (expect == "rejected") == v.rejected();
  if (!matches) std::cerr << "expected " << expect << "\n";
  return matches ? 0 : 1;
}

int cmd_witness(const Geometry& g) {
  const Primal x = g.xbar();
  const Space space = g.space(x.size());
  const ConvexSet set = g.convex_set(x.size());
  const NonsmoothWitness w = nonsmoothness_witness(space, set, x);
  json j;
  j["found"] = w.found;
  j["direction"] = to_json(w.direction);
  j["defect"] = w.defect;
  j["probe"] = w.probe;
  std::cout << dump_json(j);
  return w.found ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projection calculus in weighted l_p spaces"};
  app.require_subcommand(1);

  SuiteSpec spec;
  if (const char* env = std::getenv("PROJCALC_SEED")) {
    try {
      spec.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "PROJCALC_SEED must be a nonnegative integer\n";
      return 2;
    }
  }
  std::string out, csv, weights_mode = "unit";
  auto* run = app.add_subcommand("run", "run an invariant suite and write a JSON report");
  run->add_option("--suite", spec.suite)->required()->check(CLI::IsMember(kSuiteNames));
  run->add_option("--n", spec.n);
  run->add_option("--p", spec.p);
  run->add_option("--r", spec.r);
  run->add_option("--mask-density", spec.mask_density);
  run->add_option("--seed", spec.seed, "default from PROJCALC_SEED, else 42");
  run->add_option("--tol-scale", spec.tol_scale);
  run->add_option("--samples", spec.samples);
  run->add_option("--weights", weights_mode)->check(CLI::IsMember({"unit", "random"}));
  run->add_option("--out", out, "report path (stdout if omitted)");
  run->add_option("--csv", csv, "optional CSV of case metrics");

  Geometry og;
  std::string xstar, ystar, radii, expect;
  OracleConfig cfg;
  bool no_structured = false;
  auto* oracle = app.add_subcommand("oracle", "sampled limsup test of a coderivative pair");
  og.add_to(oracle);
  oracle->add_option("--xstar", xstar)->required();
  oracle->add_option("--ystar", ystar)->required();
  oracle->add_option("--radii", radii, "strictly decreasing radii as a JSON array");
  oracle->add_option("--directions", cfg.directions_per_radius);
  oracle->add_option("--seed", cfg.seed);
  oracle->add_option("--reject", cfg.reject_threshold);
  oracle->add_option("--accept", cfg.accept_threshold);
  oracle->add_flag("--no-structured", no_structured, "random directions only");
  oracle->add_option("--expect", expect)->check(CLI::IsMember({"rejected", "not-rejected"}));

  Geometry wg;
  auto* witness = app.add_subcommand("witness", "directional nonsmoothness witness at a boundary point");
  wg.add_to(witness);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      spec.weights = weights_mode == "random" ? WeightsMode::Random : WeightsMode::Unit;
      return cmd_run(spec, out, csv);
    }
    if (*oracle) {
      cfg.structured_probes = !no_structured;
      return cmd_oracle(og, xstar, ystar, cfg, radii, expect);
    }
    return cmd_witness(wg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
