// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "evfusion/baselines.hpp"
#include "evfusion/calibration.hpp"
#include "evfusion/coupling.hpp"
#include "evfusion/defs.hpp"
#include "evfusion/fusion.hpp"
#include "evfusion/harness/cli.hpp"
#include "evfusion/harness/dataset.hpp"
#include "evfusion/harness/evaluate.hpp"
#include "evfusion/harness/scenario.hpp"
#include "evfusion/information.hpp"
#include "fuzz.hpp"
#include "oracles.hpp"

using namespace evfusion;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string data(const std::string& rel) { return std::string(EVFUSION_DATA_DIR) + "/" + rel; }

Marginals random_marginals(std::mt19937_64& rng, std::size_t axes, std::size_t min_atoms, std::size_t max_atoms) {
  std::uniform_int_distribution<std::size_t> atoms(min_atoms, max_atoms);
  Marginals m;
  for (std::size_t a = 0; a < axes; ++a) m.push_back(oracle::random_distribution(rng, atoms(rng)));
  return m;
}

double max_marginal_error(const CouplingTable& t, const Marginals& m) {
  double worst = 0.0;
  for (std::size_t a = 0; a < m.size(); ++a) {
    const auto got = marginalize(t, a);
    for (std::size_t i = 0; i < m[a].size(); ++i) worst = std::max(worst, std::abs(got[i] - m[a][i]));
  }
  return worst;
}

Verdict greedy_near_optimality() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(500);
  double worst = -INFINITY, mean = 0.0;
  bool below_optimum = false;
  for (int i = 0; i < 500; ++i) {
    const auto m = random_marginals(rng, 2, 2, 4);
    const double greedy = joint_entropy(max_mi_coupling(m));
    const double best = oracle::min_coupling_entropy(m[0], m[1]);
    if (greedy < best - 1e-9) below_optimum = true;  // the oracle would be wrong
    worst = std::max(worst, greedy - best);
    mean += (greedy - best) / 500.0;
  }
  const double secs = seconds_since(t0);
  return {worst <= 1.0 && !below_optimum && secs < 10.0,
          fmt::format("max excess {:.6f} bit, mean {:.6f} bit over 500 instances, {:.2f} s", worst, mean, secs)};
}

Verdict marginal_preservation() {
  std::mt19937_64 rng(1000);
  double worst = 0.0;
  std::size_t tables = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto m = random_marginals(rng, 2 + i % 3, 1, 4);
    const auto hi = max_mi_coupling(m), lo = min_mi_coupling(m);
    worst = std::max({worst, max_marginal_error(hi, m), max_marginal_error(lo, m)});
    tables += 2;
    for (double rho : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      worst = std::max(worst, max_marginal_error(blend_couplings(hi, lo, rho), m));
      ++tables;
    }
  }
  return {worst <= 1e-9, fmt::format("max deviation {:.3g} over {} tables", worst, tables)};
}

Verdict entropy_identity() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto m = random_marginals(rng, 2, 1, 5);
    const auto t = blended_coupling(m, u(rng));
    const double gap = mutual_information(t) - (entropy(marginalize(t, 0)) + entropy(marginalize(t, 1)) - joint_entropy(t));
    worst = std::max(worst, std::abs(gap));
  }
  return {worst < 1e-9, fmt::format("max |I - (H(X)+H(Y)-H(X,Y))| = {:.3g} over 1000 couplings", worst)};
}

Verdict endpoint_equivalence() {
  std::mt19937_64 rng(3);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto m = random_marginals(rng, 2 + i % 3, 1, 4);
    const auto hi = max_mi_coupling(m), lo = min_mi_coupling(m);
    if (!(blend_couplings(hi, lo, 0.0) == lo)) ++mismatches;
    if (!(blend_couplings(hi, lo, 1.0) == hi)) ++mismatches;
    if (!(blended_coupling(m, 0.0) == lo) || !(blended_coupling(m, 1.0) == hi)) ++mismatches;
  }
  return {mismatches == 0, fmt::format("{} cellwise mismatches over 1000 instances at rho 0 and 1", mismatches)};
}

Verdict coherence_suite() {
  std::mt19937_64 rng(4);
  double worst_ie = 0.0, worst_not = 0.0, worst_mono = 0.0, worst_pair = 0.0;
  for (int j = 0; j < 200; ++j) {
    const std::vector<std::size_t> shape{std::size_t(2 + j % 3), std::size_t(2 + (j / 3) % 3), std::size_t(2 + (j / 9) % 2)};
    std::vector<double> cells;
    if (j % 2 == 0) {
      cells = oracle::random_distribution(rng, shape[0] * shape[1] * shape[2]);
    } else {
      const Marginals m{oracle::random_distribution(rng, shape[0]), oracle::random_distribution(rng, shape[1]),
                        oracle::random_distribution(rng, shape[2])};
      const auto b = blended_coupling(m, (j % 7) / 6.0);
      cells.assign(b.cells().begin(), b.cells().end());
    }
    const CouplingTable t(shape, cells);
    std::vector<Formula> fs;
    for (int k = 0; k < 200; ++k) fs.push_back(oracle::random_formula(rng, shape, 3));
    for (int k = 0; k < 200; ++k) {
      const auto& f = fs[static_cast<std::size_t>(k)];
      const auto& g = fs[static_cast<std::size_t>((k + 1) % 200)];
      const double pf = eval_formula_on_joint(t, f), pg = eval_formula_on_joint(t, g);
      const double pand = eval_formula_on_joint(t, Formula::all_of({f, g}));
      const double por = eval_formula_on_joint(t, Formula::any_of({f, g}));
      worst_ie = std::max(worst_ie, std::abs(por - (pf + pg - pand)));
      worst_not = std::max(worst_not, std::abs(eval_formula_on_joint(t, Formula::negate(f)) - (1.0 - pf)));
      worst_mono = std::max({worst_mono, pand - std::min(pf, pg), std::max(pf, pg) - por});
    }

    // Every two-event formula on a pair of reports, at several rho.
    const std::size_t na = shape[0], nb = shape[1];
    auto space = [](const char* f, std::size_t n) {
      std::vector<Event> ev;
      for (std::size_t i = 0; i < n; ++i) ev.push_back({fmt::format("{}{}", f, i), std::nullopt});
      return std::make_shared<const EventSpace>(f, "s", std::move(ev));
    };
    const std::vector<ProbReport> reports{ProbReport(space("x", na), oracle::random_distribution(rng, na)),
                                          ProbReport(space("y", nb), oracle::random_distribution(rng, nb))};
    for (double rho : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const auto joint = build_global_joint(reports, rho);
      for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t b = 0; b < nb; ++b) {
          const auto la = fmt::format("x{}", a), lb = fmt::format("y{}", b);
          const Formula fa = Formula::atom(la, {0, a}), fb = Formula::atom(lb, {1, b});
          worst_pair = std::max(worst_pair, std::abs(eval_pairwise(la, lb, Connective::And, reports[0], reports[1], rho) -
                                                     eval_formula_on_joint(joint, Formula::all_of({fa, fb}))));
          worst_pair = std::max(worst_pair, std::abs(eval_pairwise(la, lb, Connective::Or, reports[0], reports[1], rho) -
                                                     eval_formula_on_joint(joint, Formula::any_of({fa, fb}))));
        }
      }
    }
  }
  const bool ok = worst_ie <= 1e-12 && worst_not <= 1e-12 && worst_mono <= 1e-12 && worst_pair <= 1e-12;
  return {ok, fmt::format("inclusion-exclusion {:.2g}, complement {:.2g}, monotonicity {:.2g}, pairwise/global {:.2g}",
                          worst_ie, worst_not, worst_mono, worst_pair)};
}

MassFunction random_mass(std::mt19937_64& rng, const std::vector<std::string>& frame) {
  const FocalSet whole = static_cast<FocalSet>((1u << frame.size()) - 1);
  std::uniform_int_distribution<FocalSet> pick(1, whole);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::map<FocalSet, double> m;
  double total = 0.0;
  const int focal = std::uniform_int_distribution<int>(1, 5)(rng);
  for (int i = 0; i < focal; ++i) {
    const double w = u(rng);
    m[pick(rng)] += w;
    total += w;
  }
  m[whole] += 0.02;
  total += 0.02;
  for (auto& [s, v] : m) v /= total;
  return MassFunction(frame, m);
}

Verdict dempster_oracle() {
  const std::vector<std::string> ab{"A", "B"};
  const MassFunction m1(ab, {{0b01, 0.6}, {0b10, 0.4}}), m2(ab, {{0b01, 0.7}, {0b10, 0.3}});
  const auto c = dempster_combine_with_conflict(m1, m2);
  double k = 0.0;
  const auto brute = oracle::dempster_enumerate(m1.masses(), m2.masses(), 2, &k);
  bool ok = std::abs(c.result.mass(0b01) - 0.77778) <= 1e-5 && std::abs(c.conflict - 0.46) <= 1e-12 &&
            std::abs(k - c.conflict) <= 1e-15;
  for (const auto& [s, v] : brute) ok = ok && std::abs(c.result.mass(s) - v) <= 1e-12;

  std::mt19937_64 rng(6);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> frame;
    for (int f = 0; f < 1 + i % 4; ++f) frame.push_back(std::string(1, static_cast<char>('A' + f)));
    const auto a = random_mass(rng, frame), b = random_mass(rng, frame), d = random_mass(rng, frame);
    const auto ab_ = dempster_combine(a, b), ba = dempster_combine(b, a);
    const auto left = dempster_combine(ab_, d), right = dempster_combine(a, dempster_combine(b, d));
    for (FocalSet s = 1; s <= a.whole(); ++s) {
      worst = std::max({worst, std::abs(ab_.mass(s) - ba.mass(s)), std::abs(left.mass(s) - right.mass(s))});
    }
  }
  ok = ok && worst <= 1e-9;
  return {ok, fmt::format("A = {:.8f}, B = {:.8f}, K = {:.6f}; max commutativity/associativity gap {:.2g} over 200",
                          c.result.mass(0b01), c.result.mass(0b10), c.conflict, worst)};
}

// Coarse-to-fine grid over (a, b) in [-20, 20]^2, refining tenfold per level.
PlattModel platt_grid(const std::vector<double>& s, const std::vector<int>& y) {
  PlattModel best{0.0, 0.0};
  double best_ll = platt_log_likelihood(s, y, best);
  double ca = 0.0, cb = 0.0;
  for (double step = 1.0; step >= 1e-7; step /= 10.0) {
    for (int i = -20; i <= 20; ++i) {
      for (int j = -20; j <= 20; ++j) {
        const PlattModel m{ca + i * step, cb + j * step};
        if (std::abs(m.a) > 20.0 || std::abs(m.b) > 20.0) continue;
        const double ll = platt_log_likelihood(s, y, m);
        if (ll > best_ll) {
          best_ll = ll;
          best = m;
        }
      }
    }
    ca = best.a;
    cb = best.b;
  }
  return best;
}

Verdict platt_recovery() {
  std::mt19937_64 rng(10000);
  std::normal_distribution<double> score(0.5, 1.5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(10000);
  std::vector<int> y(10000);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = score(rng);
    y[i] = u(rng) < 1.0 / (1.0 + std::exp(-2.0 * s[i] + 1.0)) ? 1 : 0;
  }
  const auto m = platt_fit(s, y);
  const auto g = platt_grid(s, y);
  const double ll = platt_log_likelihood(s, y, m), gll = platt_log_likelihood(s, y, g);
  const bool ok = std::abs(m.a + 2.0) <= 0.15 && std::abs(m.b - 1.0) <= 0.15 && ll >= gll - 1e-6;
  return {ok, fmt::format("fit (a, b) = ({:.4f}, {:.4f}); log-likelihood {:.9f} vs grid {:.9f}", m.a, m.b, ll, gll)};
}

// Values from the oracle run of the shipped scenario (seed 42, n = 2000).
constexpr double kPinnedRho = 0.702530995254;
constexpr double kPinnedAccProposed = 0.789;
constexpr double kPinnedAccIndependent = 0.7775;
constexpr double kPinnedAucO2Proposed = 0.850928713529;
constexpr double kPinnedAucO2Independent = 0.836143516025;

Verdict fusion_benefit() {
  const auto t0 = Clock::now();
  const auto cfg = harness::load_scenario_config(data("scenarios/correlated_dataset1.json"));
  const auto defs = resolve(harness::load_definitions(data("defs/dataset1.defs")));
  const auto ds = harness::generate_scenario(cfg);

  harness::Method proposed;
  proposed.estimator = RhoMethod::Pearson;
  harness::Method independent;
  independent.kind = harness::MethodKind::Independent;
  const double rho = harness::resolve_rho(ds, proposed);
  const auto mp = harness::evaluate(ds, proposed, defs);
  const auto mi = harness::evaluate(ds, independent, defs);
  const auto o2 = static_cast<std::size_t>(
      std::find(mp.classes.begin(), mp.classes.end(), "o2") - mp.classes.begin());
  const double secs = seconds_since(t0);

  const bool pinned = std::abs(rho - kPinnedRho) <= 1e-9 && std::abs(mp.accuracy - kPinnedAccProposed) <= 1e-12 &&
                      std::abs(mi.accuracy - kPinnedAccIndependent) <= 1e-12 &&
                      std::abs(mp.auc[o2] - kPinnedAucO2Proposed) <= 1e-9 &&
                      std::abs(mi.auc[o2] - kPinnedAucO2Independent) <= 1e-9;
  const bool ok = cfg.seed == 42 && cfg.n_samples == 2000 && mp.accuracy >= mi.accuracy &&
                  mp.auc[o2] >= mi.auc[o2] && pinned && secs < 30.0;
  return {ok, fmt::format("rho {:.6f}; accuracy {:.4f} vs {:.4f}; minority AUC {:.6f} vs {:.6f}; pinned {}; {:.2f} s",
                          rho, mp.accuracy, mi.accuracy, mp.auc[o2], mi.auc[o2], pinned ? "match" : "DIFFER", secs)};
}

Verdict dsl_round_trip_and_fuzz() {
  bool ok = true;
  std::string detail;
  std::string seed_text;
  for (const auto* name : {"defs/dataset1.defs", "defs/dataset2.defs"}) {
    const auto text = harness::read_text_file(data(name));
    seed_text += text;
    const auto d = parse_definitions(text);
    const auto r = resolve(d);
    const bool rt = structurally_equal(parse_definitions(to_source(d)), d);
    ok = ok && rt && r.objects.size() == 3;
    detail += fmt::format("{}: {} spaces, {} objects, round-trip {}; ", name, r.spaces.size(), r.objects.size(),
                          rt ? "ok" : "FAILED");
  }
  ok = ok && resolve(parse_definitions(harness::read_text_file(data("defs/dataset1.defs")))).spaces.size() == 5;

  std::mt19937_64 rng(10000);
  int parsed = 0, errors = 0, other = 0, bad_pos = 0;
  for (int i = 0; i < 10000; ++i) {
    bool pos_ok = true;
    switch (fuzz::run_one(fuzz::fuzz_input(rng, seed_text), &pos_ok)) {
      case fuzz::Outcome::Parsed: ++parsed; break;
      case fuzz::Outcome::ParseError: ++errors; break;
      case fuzz::Outcome::OtherException: ++other; break;
    }
    if (!pos_ok) ++bad_pos;
  }
  ok = ok && other == 0 && bad_pos == 0;
  detail += fmt::format("fuzz: {} parsed, {} ParseErrors, {} other exceptions, {} bad positions", parsed, errors,
                        other, bad_pos);
  return {ok, detail};
}

Verdict eval_determinism() {
  const fs::path dir = fs::temp_directory_path() / "evfusion_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto p = [&](const char* name) { return (dir / name).string(); };
  auto cli = [](std::vector<std::string> args) {
    args.insert(args.begin(), "evfusion");
    std::ostringstream out, err;
    return harness::run_cli(args, out, err);
  };
  bool ok = cli({"simulate", "--config", data("scenarios/correlated_dataset1.json"), "--out", p("r.json"),
                 "--labels-out", p("l.csv"), "--features-out", p("f.csv")}) == 0;
  std::string reference;
  int identical = 0;
  for (int i = 0; i < 3 && ok; ++i) {
    ok = cli({"eval", "--defs", data("defs/dataset1.defs"), "--reports", p("r.json"), "--labels", p("l.csv"),
              "--method", "proposed", "--estimate-rho", "pearson", "--train", p("f.csv"), "--runs", "10", "--seed",
              "42", "--metrics-out", p("m.csv"), "--roc-out", p("roc.csv")}) == 0;
    const auto both = harness::read_text_file(p("m.csv")) + harness::read_text_file(p("roc.csv"));
    if (i == 0) {
      reference = both;
    } else if (both == reference) {
      ++identical;
    }
  }
  fs::remove_all(dir);
  ok = ok && identical == 2 && !reference.empty();
  return {ok, fmt::format("{} of 2 repeated eval runs byte-identical ({} bytes of metrics and ROC)", identical,
                          reference.size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"greedy_near_optimality", greedy_near_optimality},
      {"marginal_preservation", marginal_preservation},
      {"mutual_information_entropy_identity", entropy_identity},
      {"endpoint_equivalence", endpoint_equivalence},
      {"coherence_suite", coherence_suite},
      {"dempster_shafer_oracle", dempster_oracle},
      {"platt_recovery", platt_recovery},
      {"synthetic_fusion_benefit", fusion_benefit},
      {"dsl_round_trip_and_fuzz", dsl_round_trip_and_fuzz},
      {"eval_determinism", eval_determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v{false, {}};
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    if (!v.pass) ++failed;
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
