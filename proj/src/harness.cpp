#include "ulab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ulab/cartan.hpp"
#include "ulab/cfrac.hpp"
#include "ulab/dani.hpp"
#include "ulab/errors.hpp"
#include "ulab/field.hpp"
#include "ulab/laurent.hpp"
#include "ulab/shrinking.hpp"
#include "ulab/stats.hpp"
#include "ulab/tree.hpp"

namespace ulab::harness {

namespace {

const std::set<std::string> kKinds{"cfrac-stats", "kg", "loglaw", "tail", "sprindzhuk", "ed", "siegel", "selftest"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
bool parse_number(const std::string& v, T& out) {
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string fmt_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

// Range and membership checks shared by the parser and validate().
std::string check(const ExperimentConfig& c, const std::string& key) {
  auto range = [](std::int64_t v, std::int64_t lo, std::int64_t hi) { return v >= lo && v <= hi; };
  if (key == "kind" && !kKinds.count(c.kind)) return "unknown kind '" + c.kind + "'";
  if (key == "q") {
    std::uint32_t p, k;
    if (!prime_power(c.q, p, k)) return "q = " + std::to_string(c.q) + " is not a prime power";
    if (c.q > 64) return "q must be <= 64";
  }
  if ((key == "m" || key == "n") && (!range(c.m, 1, 4) || !range(c.n, 1, 4))) return key + " must be in 1..4";
  if (key == "psi") {
    try {
      PsiSpec::parse(c.psi);
    } catch (const std::exception& e) {
      return std::string("bad psi: ") + e.what();
    }
  }
  if (key == "N" && !range(c.N, 2, 10000000)) return "N must be in 2..10^7";
  if (key == "D" && !range(c.D, 1, 40)) return "D must be in 1..40";
  if (key == "L" && !range(c.L, 0, 40)) return "L must be in 0..40";
  if (key == "t" && !range(c.t, 1, 64)) return "t must be in 1..64";
  if (key == "H" && !range(c.H, 4, 4096)) return "H must be in 4..4096";
  if (key == "samples" && (c.samples < 1 || c.samples > 10000000)) return "samples must be in 1..10^7";
  if (key == "source" && c.source != "haar" && c.source != "flow") return "source must be haar or flow";
  if (key == "family" && c.family != "independent" && c.family != "duplicated" && c.family != "cusp")
    return "family must be independent, duplicated or cusp";
  if (key == "eps" && !(c.eps > 0 && c.eps <= 1)) return "eps must be in (0, 1]";
  if (key == "out" && c.out.empty()) return "out must not be empty";
  return {};
}

const std::vector<std::string> kKeys{"kind", "q", "m", "n", "psi", "N", "D", "L", "t", "H",
                                     "samples", "seed", "source", "family", "eps", "out"};

// ---------------------------------------------------------------------------

struct Output {
  std::ostringstream report;
  std::vector<std::pair<std::string, std::string>> csvs;
  bool ok = true;
  std::string summary;

  void claim(bool pass, const std::string& what) {
    report << (pass ? "PASS " : "FAIL ") << what << '\n';
    ok = ok && pass;
  }
};

std::string fixed(double x, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

void cfrac_stats(const ExperimentConfig& c, int workers, Output& o) {
  const DegreeTable table = pq_degree_stats(c.samples, c.q, 16, c.seed, 64, workers);
  const auto chi = table.chi_square();
  o.csvs.emplace_back("degrees.csv", table.csv());
  o.report << "tallied quotients: " << table.total() << "\ntruncated: " << table.truncated << '\n';
  o.report << "chi-square: " << fixed(chi.statistic) << " dof " << chi.dof << " critical(99%) " << fixed(chi.critical)
           << '\n';
  o.claim(chi.accepted, "degree law (q-1) q^-d");
}

void kg(const ExperimentConfig& c, int workers, Output& o) {
  KgConfig k;
  k.psi = PsiSpec::parse(c.psi);
  k.q = c.q;
  k.m = c.m;
  k.n = c.n;
  k.samples = c.samples;
  k.D = c.D;
  k.seed = c.seed;
  k.workers = workers;
  const KgReport rep = kg_experiment(k);
  o.report << rep.text();
  o.csvs.emplace_back("beyond.csv", rep.beyond_csv());
  const double ns = static_cast<double>(c.samples);
  if (rep.series.cusp_side == Verdict::Divergent) {
    o.claim(rep.top_window_fraction >= 0.9, "divergent psi: solution in (D/2, D] for >= 90% of A");
  } else if (rep.series.cusp_side == Verdict::Convergent) {
    const auto d0 = static_cast<std::size_t>(c.D / 2);
    const double frac = d0 < rep.beyond.size() ? static_cast<double>(rep.beyond[d0]) / ns : 0.0;
    o.claim(frac <= 0.1, "convergent psi: solution beyond D/2 for <= 10% of A");
  } else {
    o.report << "no claim: series test inconclusive\n";
  }
}

void loglaw(const ExperimentConfig& c, int workers, Output& o) {
  const LoglawReport rep = loglaw_limsup(c.samples, static_cast<std::size_t>(c.N), c.q, c.seed, workers);
  std::ostringstream stats_csv;
  stats_csv.precision(10);
  stats_csv << "sample,statistic\n";
  for (std::size_t j = 0; j < rep.statistics.size(); ++j) stats_csv << j << ',' << rep.statistics[j] << '\n';
  o.csvs.emplace_back("loglaw.csv", rep.csv());
  o.csvs.emplace_back("loglaw_stats.csv", stats_csv.str());
  o.report << "median statistic: " << fixed(rep.median) << '\n';
  o.claim(rep.median >= 0.85 && rep.median <= 1.15, "median log-law statistic in [0.85, 1.15]");
}

void tail(const ExperimentConfig& c, int workers, Output& o) {
  std::vector<double> deltas;
  double kappa = 0, tol = 0;
  if (c.source == "haar") {
    if (c.m != 1 || c.n != 1) throw DomainError("source = haar needs m = n = 1");
    const RayModel ray = ray_measure(c.q, c.L);
    const HaarBatch batch = haar_sample_d2(ray, c.samples, c.L, c.seed, workers);
    for (const auto& s : batch.samples) deltas.push_back(s.delta());
    o.csvs.emplace_back("ray.csv", ray.csv());
    o.report << "ray depth: " << c.L << "\nray c1, c2: " << fixed(ray.c1()) << ", " << fixed(ray.c2())
             << "\ntruncated mass: " << fixed(batch.truncated_mass) << '\n';
    kappa = 2 * std::log(static_cast<double>(c.q));
    tol = 0.05;
  } else {
    deltas = flow_delta_samples(c.q, c.m, c.n, c.t, c.samples, c.seed, workers);
    kappa = static_cast<double>(c.m + c.n) * std::log(static_cast<double>(c.q));
    tol = 0.15;
  }
  const TailFit fit = tail_fit(deltas, c.seed);
  o.csvs.emplace_back("tail.csv", fit.csv());
  o.report << "kappa: " << fixed(fit.kappa) << " [" << fixed(fit.kappa_lo) << ", " << fixed(fit.kappa_hi) << "]\n";
  o.report << "expected kappa: " << fixed(kappa) << "\nC1, C2: " << fixed(fit.c1) << ", " << fixed(fit.c2) << '\n';
  o.claim(std::abs(fit.kappa / kappa - 1) <= tol, "kappa within " + fixed(tol * 100) + "% of expected");
}

void sprindzhuk(const ExperimentConfig& c, int workers, Output& o) {
  const PsiSpec psi = PsiSpec::parse(c.psi);
  const auto N = static_cast<std::size_t>(c.N);
  HitFamily h(0, 0);
  if (c.family == "independent") {
    if (!psi.is_power()) throw DomainError("family = independent needs a power psi");
    const double scale = std::pow(static_cast<double>(c.q), psi.value(0));
    std::vector<double> mu(N);
    for (std::size_t t = 1; t <= N; ++t) mu[t - 1] = std::min(1.0, scale * std::pow(static_cast<double>(t), -psi.tau()));
    h = HitFamily::independent(mu, c.samples, c.seed, workers);
  } else if (c.family == "duplicated") {
    h = HitFamily::duplicated(c.samples, N, c.seed);
  } else {
    h = HitFamily::cusp(psi, c.q, c.m, c.n, c.samples, N, c.seed, workers);
  }
  const BcReport bc = bc_verdict(h);
  const QuasiIndependence qi = quasi_independence(h);
  o.csvs.emplace_back("trajectory.csv", trajectory_csv(bc.trajectory));
  o.report << "verdict: " << to_string(bc.verdict) << "\nE_N: " << fixed(bc.e_total) << "\nE_N - E_N/2: "
           << fixed(bc.e_gain) << "\nmedian S/E: " << fixed(bc.median_ratio) << '\n';
  o.report << "pair-correlation growth slope: " << fixed(qi.growth_slope)
           << (qi.violated ? " (quasi-independence violated)\n" : "\n");
  if (N >= 1000 && bc.e_total > 0) {
    const auto et = error_term_check(h, log_grid(std::min<std::size_t>(100, N / 10), N, 12), c.eps);
    o.report << "error exponent: " << fixed(et.exponent) << "\nerror constant: " << fixed(et.c)
             << "\nfraction within bound: " << fixed(et.fraction_within) << '\n';
  }
  if (c.family == "independent") {
    const BcVerdict want = psi.tau() > 1 ? BcVerdict::MeasureZero : BcVerdict::FullMeasure;
    o.claim(bc.verdict == want, "verdict " + to_string(want));
  } else if (c.family == "duplicated") {
    o.claim(qi.violated, "duplicated family flagged");
  } else if (bc.verdict != BcVerdict::Inconclusive) {
    const Verdict series = series_test(psi, c.m, c.n).cusp_side;
    const bool match = (bc.verdict == BcVerdict::MeasureZero) == (series == Verdict::Convergent);
    o.claim(series == Verdict::Inconclusive || match, "verdict agrees with the measure series");
  } else {
    o.report << "no claim: verdict inconclusive\n";
  }
}

void ed(const ExperimentConfig& c, int, Output& o) {
  const Field& f = Field::get(c.q);
  auto dist = [&](std::int64_t s, std::int64_t t) {
    return static_cast<double>(cartan_distance(diagonal_matrix(f, FlowSpec{c.m, c.n, s - t}.exponents())));
  };
  const EdReport rep = ed_check(dist, c.H, {0.1, 1, 10});
  std::ostringstream csv;
  csv.precision(10);
  csv << "beta,certified,partial_sup,bound\n";
  for (const auto& r : rep.results) csv << r.beta << ',' << r.certified << ',' << r.partial_sup << ',' << r.bound << '\n';
  o.csvs.emplace_back("ed.csv", csv.str());
  o.report << "slope: " << fixed(rep.slope) << "\nhalf-horizon slope: " << fixed(rep.half_slope) << '\n';
  o.claim(rep.all_certified(), "diagonal flow certified for beta in {0.1, 1, 10}");
}

void siegel(const ExperimentConfig& c, int workers, Output& o) {
  const SiegelReport rep = siegel_check_d2(c.q, {1, 2}, c.samples, c.seed, workers);
  std::ostringstream csv;
  csv.precision(10);
  csv << "B,lhs,rhs,rhs_se,ratio,ratio_lo,ratio_hi\n";
  for (const auto& p : rep.points)
    csv << p.B << ',' << p.lhs << ',' << p.rhs << ',' << p.rhs_se << ',' << p.ratio << ',' << p.ratio_lo << ','
        << p.ratio_hi << '\n';
  o.csvs.emplace_back("siegel.csv", csv.str());
  o.report << "spread: " << fixed(rep.spread) << '\n';
  o.claim(rep.spread <= 0.1, "C(2) agrees across radii within 10%");
}

using Experiment = std::function<void(const ExperimentConfig&, int, Output&)>;

const std::map<std::string, Experiment>& experiments() {
  static const std::map<std::string, Experiment> table{
      {"cfrac-stats", cfrac_stats}, {"kg", kg},   {"loglaw", loglaw}, {"tail", tail},
      {"sprindzhuk", sprindzhuk},   {"ed", ed},   {"siegel", siegel},
  };
  return table;
}

void selftest(const ExperimentConfig& c, int workers, Output& o) {
  const char* runs[] = {
      "kind = cfrac-stats\nsamples = 5000",
      "kind = kg\npsi = power:3\nsamples = 200\nD = 12",
      "kind = loglaw\nsamples = 40\nN = 20000",
      "kind = tail\nsamples = 20000\nL = 20",
      "kind = sprindzhuk\nsamples = 200\nN = 10000",
      "kind = sprindzhuk\nfamily = duplicated\nsamples = 200\nN = 4096",
      "kind = ed\nH = 32",
      "kind = siegel\nsamples = 20000",
  };
  for (const char* text : runs) {
    ExperimentConfig sub = parse_config(text);
    sub.seed = c.seed;
    Output inner;
    experiments().at(sub.kind)(sub, workers, inner);
    std::string first = text;
    std::replace(first.begin(), first.end(), '\n', ' ');
    o.claim(inner.ok, first);
  }
}

std::string header(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "# ulab " << ULAB_VERSION << '\n';
  os << "# precision = " << default_precision() << '\n';
  std::istringstream lines(c.echo());
  for (std::string line; std::getline(lines, line);) os << "# " << line << '\n';
  return os.str();
}

}  // namespace

std::string ExperimentConfig::echo() const {
  std::ostringstream os;
  os << "kind = " << kind << "\nq = " << q << "\nm = " << m << "\nn = " << n << "\npsi = " << psi << "\nN = " << N
     << "\nD = " << D << "\nL = " << L << "\nt = " << t << "\nH = " << H << "\nsamples = " << samples
     << "\nseed = " << seed << "\nsource = " << source << "\nfamily = " << family << "\neps = " << fmt_double(eps)
     << '\n';
  return os.str();
}

void ExperimentConfig::validate() const {
  for (const auto& key : kKeys) {
    if (auto err = check(*this, key); !err.empty()) throw ParseError(err);
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    auto fail = [&](const std::string& msg) { throw ParseError("line " + std::to_string(lineno) + ": " + msg); };
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) fail("unknown key '" + key + "'");
    if (!seen.insert(key).second) fail("repeated key '" + key + "'");
    if (value.empty()) fail("missing value for '" + key + "'");
    bool ok = true;
    if (key == "kind") c.kind = value;
    else if (key == "q") ok = parse_number(value, c.q);
    else if (key == "m") ok = parse_number(value, c.m);
    else if (key == "n") ok = parse_number(value, c.n);
    else if (key == "psi") c.psi = value;
    else if (key == "N") ok = parse_number(value, c.N);
    else if (key == "D") ok = parse_number(value, c.D);
    else if (key == "L") ok = parse_number(value, c.L);
    else if (key == "t") ok = parse_number(value, c.t);
    else if (key == "H") ok = parse_number(value, c.H);
    else if (key == "samples") ok = parse_number(value, c.samples);
    else if (key == "seed") ok = parse_number(value, c.seed);
    else if (key == "source") c.source = value;
    else if (key == "family") c.family = value;
    else if (key == "eps") ok = parse_number(value, c.eps);
    else if (key == "out") c.out = value;
    if (!ok) fail("bad value '" + value + "' for '" + key + "'");
    if (auto err = check(c, key); !err.empty()) fail(err);
  }
  if (seen.empty()) throw ParseError("empty config");
  if (!seen.count("kind")) throw ParseError("missing kind");
  return c;
}

std::string config_help() {
  const ExperimentConfig d;
  std::ostringstream os;
  os << "Config file: one `key = value` per line, '#' comments.  Defaults:\n";
  std::istringstream lines(d.echo());
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("kind", 0) == 0) line = "kind = (required) cfrac-stats|kg|loglaw|tail|sprindzhuk|ed|siegel|selftest";
    os << "  " << line << '\n';
  }
  os << "  out = " << d.out << '\n';
  return os.str();
}

RunResult run(const ExperimentConfig& config, const std::filesystem::path& out, int workers) {
  config.validate();
  if (config.kind.empty()) throw ParseError("missing kind");
  Output o;
  RunResult result;
  try {
    if (config.kind == "selftest") selftest(config, workers, o);
    else experiments().at(config.kind)(config, workers, o);
    result.exit_code = o.ok ? Ok : ClaimFailed;
    result.summary = std::string(o.ok ? "PASS " : "FAIL ") + config.kind;
  } catch (const PrecisionError& e) {
    o.report << "precision error: " << e.what() << '\n';
    result.exit_code = Precision;
    result.summary = "ERROR " + config.kind + ": precision";
  } catch (const DomainError& e) {
    o.report << "error: " << e.what() << '\n';
    result.exit_code = Usage;
    result.summary = "ERROR " + config.kind + ": " + e.what();
  }
  o.report << result.summary << '\n';

  std::filesystem::create_directories(out);
  const std::string head = header(config);
  auto write = [&](const std::string& name, const std::string& body) {
    const auto path = out / name;
    std::ofstream f(path, std::ios::binary);
    f << head << body;
    if (!f) throw std::runtime_error("cannot write " + path.string());
    result.files.push_back(path);
  };
  write("report.txt", o.report.str());
  for (const auto& [name, body] : o.csvs) write(name, body);
  return result;
}

}  // namespace ulab::harness
