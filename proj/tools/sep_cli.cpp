// Reproduction harness for the exclusion-process mixing experiments.
// Subcommands: profile | tvnu | coalesce | exact | clt | tails.
// Output rows all carry (seed, config_hash) provenance; identical
// config+seed reruns are byte-identical for any thread count.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sep/dynamics.hpp"
#include "sep/exact.hpp"
#include "sep/lattice.hpp"
#include "sep/rng.hpp"
#include "sep/spectral.hpp"
#include "sep/stats.hpp"
#include "sep/tilted.hpp"
#include "sep/util.hpp"

namespace {

struct Options {
  std::vector<int> n_list{128};
  std::vector<double> s_grid;
  std::vector<double> gamma_grid;
  std::vector<double> t_grid;
  double alpha = 0.0;
  bool alpha_set = false;
  double theta = 0.0;
  int replicas = 1000;
  uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  unsigned threads = 1;
  double t_max = 0.0;
  std::string config_file;
};

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Hash of the semantic configuration (threads and output path excluded, so
// reruns on different machines agree byte for byte).
uint64_t config_hash(const std::string& experiment, const Options& o) {
  std::ostringstream s;
  s << experiment << ";n=";
  for (int n : o.n_list) s << n << ",";
  s << ";s=";
  for (double v : o.s_grid) s << format_number(v) << ",";
  s << ";gamma=";
  for (double v : o.gamma_grid) s << format_number(v) << ",";
  s << ";t=";
  for (double v : o.t_grid) s << format_number(v) << ",";
  s << ";alpha=" << (o.alpha_set ? format_number(o.alpha) : "auto")
    << ";theta=" << format_number(o.theta) << ";replicas=" << o.replicas
    << ";seed=" << o.seed << ";tmax=" << format_number(o.t_max);
  uint64_t h = 0x5e9c;
  for (char c : s.str()) h = sep::hash_combine(h, static_cast<uint8_t>(c));
  return h;
}

class RowWriter {
 public:
  RowWriter(const std::string& path, const std::string& format,
            const std::string& experiment, uint64_t seed, uint64_t hash,
            std::vector<std::string> columns)
      : json_(format == "json-lines"), columns_(std::move(columns)) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output file: " + path);
      out_ = &file_;
    } else {
      out_ = &std::cout;
    }
    char seed_hex[32], hash_hex[32];
    std::snprintf(seed_hex, sizeof seed_hex, "%016" PRIx64, seed);
    std::snprintf(hash_hex, sizeof hash_hex, "%016" PRIx64, hash);
    seed_ = seed_hex;
    hash_ = hash_hex;
    if (!json_) {
      (*out_) << "# sep-csv v1 experiment=" << experiment << " seed=" << seed_
              << " config_hash=" << hash_ << "\n";
      for (std::size_t i = 0; i < columns_.size(); ++i)
        (*out_) << columns_[i] << (i + 1 < columns_.size() ? "," : "");
      (*out_) << ",seed,config_hash\n";
    }
    out_->flush();
  }

  void row(const std::vector<std::string>& values) {
    if (values.size() != columns_.size())
      throw std::logic_error("row arity mismatch");
    if (json_) {
      (*out_) << "{";
      for (std::size_t i = 0; i < values.size(); ++i)
        (*out_) << "\"" << columns_[i] << "\":" << json_value(values[i]) << ",";
      (*out_) << "\"seed\":\"" << seed_ << "\",\"config_hash\":\"" << hash_
              << "\"}\n";
    } else {
      for (const std::string& v : values) (*out_) << v << ",";
      (*out_) << seed_ << "," << hash_ << "\n";
    }
    out_->flush();  // interrupted runs keep a valid prefix
  }

 private:
  static std::string json_value(const std::string& v) {
    if (v.empty()) return "null";
    char* end = nullptr;
    std::strtod(v.c_str(), &end);
    bool numeric = end && *end == '\0';
    if (!numeric) return "\"" + v + "\"";
    if (v == "inf") return "\"inf\"";
    return v;
  }
  bool json_;
  std::vector<std::string> columns_;
  std::ofstream file_;
  std::ostream* out_ = nullptr;
  std::string seed_, hash_;
};

// --- profile -------------------------------------------------------------

int run_profile(const Options& o) {
  RowWriter w(o.out, o.format, "profile", o.seed, config_hash("profile", o),
              {"N", "s", "t", "replicas", "tv_estimate", "tv_half_width",
               "tv_double_width", "std_error", "bin_width", "erf_target"});
  std::vector<double> s_grid = o.s_grid.empty()
                                   ? std::vector<double>{-1.0, 0.0, 1.0}
                                   : o.s_grid;
  for (int n : o.n_list) {
    sep::ParticleConfiguration chi_max = sep::worst_case(n);
    sep::ModeProjection mode = sep::slow_mode(chi_max);
    int n2 = 2 * n;
    std::vector<double> weights(n2);
    for (int x = 1; x <= n2; ++x)
      weights[x - 1] = std::sin(M_PI * x / n + mode.phase);

    for (double s : s_grid) {
      double t = sep::mixing_schedule(n, s);
      int r = o.replicas;
      std::vector<double> dynamic(r), stationary(r);
      uint64_t stream = sep::hash_combine(o.seed, static_cast<uint64_t>(n));
      stream = sep::hash_combine(
          stream, static_cast<uint64_t>(std::llround(s * 1024.0)));
      sep::parallel_for(r, o.threads, [&](std::size_t i) {
        sep::Rng rng(sep::derive_seed(stream, i));
        auto trace = sep::simulate_exclusion(chi_max, t, rng, {t});
        double a = 0.0;
        for (int x = 1; x <= n2; ++x)
          a += trace[0].spin(x) * weights[x - 1];
        dynamic[i] = a;
        sep::Rng rng2(sep::derive_seed(stream, (uint64_t{1} << 40) + i));
        auto eq = sep::uniform_sample(n, n, rng2);
        double b = 0.0;
        for (int x = 1; x <= n2; ++x) b += eq.spin(x) * weights[x - 1];
        stationary[i] = b;
      });
      std::vector<double> pooled = dynamic;
      pooled.insert(pooled.end(), stationary.begin(), stationary.end());
      double h = sep::freedman_diaconis_width(pooled);
      sep::BinnedTv tv = sep::binned_tv(dynamic, stationary, h);
      sep::BinnedTv tv_half = sep::binned_tv(dynamic, stationary, h / 2.0);
      sep::BinnedTv tv_double = sep::binned_tv(dynamic, stationary, 2.0 * h);
      w.row({std::to_string(n), format_number(s), format_number(t),
             std::to_string(r), format_number(tv.value),
             format_number(tv_half.value), format_number(tv_double.value),
             format_number(tv.std_error), format_number(h),
             format_number(sep::cutoff_profile(s))});
    }
  }
  return 0;
}

// --- tvnu ----------------------------------------------------------------

int run_tvnu(const Options& o) {
  RowWriter w(o.out, o.format, "tvnu", o.seed, config_hash("tvnu", o),
              {"N", "gamma", "alpha", "samples", "tv_estimate", "std_error",
               "erf_target", "log_partition"});
  std::vector<double> gammas =
      o.gamma_grid.empty() ? std::vector<double>{0.5, 1.0, 2.0} : o.gamma_grid;
  for (int n : o.n_list) {
    for (double gamma : gammas) {
      double alpha = gamma / std::sqrt(static_cast<double>(n));
      sep::TiltedMeasureSpec spec{n, alpha, o.theta};
      uint64_t stream = sep::hash_combine(o.seed, static_cast<uint64_t>(n));
      stream = sep::hash_combine(
          stream, static_cast<uint64_t>(std::llround(gamma * 1024.0)));
      sep::TvEstimate est = sep::tv_to_uniform_mc(
          spec, static_cast<uint64_t>(o.replicas), stream, o.threads);
      w.row({std::to_string(n), format_number(gamma), format_number(alpha),
             std::to_string(est.samples), format_number(est.value),
             format_number(est.std_error),
             format_number(std::erf(gamma / std::sqrt(8.0))),
             format_number(sep::log_partition(spec))});
    }
  }
  return 0;
}

// --- coalesce ------------------------------------------------------------

int run_coalesce(const Options& o) {
  RowWriter w(o.out, o.format, "coalesce", o.seed, config_hash("coalesce", o),
              {"N", "alpha", "replica", "tau", "censored", "h0_functional",
               "cal_h0", "initial_area", "events", "checkpoint",
               "uncoalesced_at_checkpoint"});
  for (int n : o.n_list) {
    double alpha = o.alpha_set
                       ? o.alpha
                       : 2.0 * std::pow(static_cast<double>(n), -3.0 / 7.0);
    double regime = 2.0 * std::pow(static_cast<double>(n), -3.0 / 7.0);
    if (alpha > regime + 1e-12)
      std::cerr << "warning: alpha " << alpha
                << " is outside the small-tilt regime (<= " << regime << ")\n";
    double t_max =
        o.t_max > 0 ? o.t_max : sep::default_coalescence_horizon(n);
    uint64_t stream = sep::hash_combine(o.seed, static_cast<uint64_t>(n));
    auto results = sep::coalescence_experiment(n, alpha, o.theta, o.replicas,
                                               t_max, stream, o.threads);
    double checkpoint = sep::coalescence_checkpoint(n);
    double frac = sep::fraction_uncoalesced(results, checkpoint);
    for (std::size_t i = 0; i < results.size(); ++i) {
      const sep::CoalescenceResult& r = results[i];
      w.row({std::to_string(n), format_number(alpha), std::to_string(i),
             format_number(r.tau), r.censored ? "1" : "0",
             format_number(r.h0_functional), std::to_string(r.cal_h0),
             std::to_string(r.initial_area), std::to_string(r.events),
             format_number(checkpoint), format_number(frac)});
    }
  }
  return 0;
}

// --- exact ---------------------------------------------------------------

int run_exact(const Options& o) {
  RowWriter w(o.out, o.format, "exact", o.seed, config_hash("exact", o),
              {"N", "t", "d_exact", "alpha_t", "tv_tilted_from_worst",
               "tv_uniform_from_worst", "tv_tilt_evolution"});
  for (int n : o.n_list) {
    std::vector<double> grid = o.t_grid;
    if (grid.empty()) {
      double t_star = sep::mixing_schedule(n, 0.0);
      for (int j = 0; j <= 12; ++j) grid.push_back(t_star * j / 4.0);
    }
    sep::ParticleConfiguration chi = sep::worst_case(n);
    auto tilted = sep::verify_tilted_approximation(n, chi, grid);
    std::vector<sep::TiltEvolutionRow> evo;
    if (o.alpha_set) evo = sep::verify_tilt_evolution(n, o.alpha, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      w.row({std::to_string(n), format_number(grid[i]),
             format_number(sep::exact_distance_profile(n, grid[i])),
             format_number(tilted[i].alpha), format_number(tilted[i].tv_tilted),
             format_number(tilted[i].tv_uniform),
             o.alpha_set ? format_number(evo[i].tv) : "0"});
    }
  }
  return 0;
}

// --- clt -----------------------------------------------------------------

int run_clt(const Options& o) {
  RowWriter w(o.out, o.format, "clt", o.seed, config_hash("clt", o),
              {"N", "theta", "samples", "ks_distance"});
  std::vector<double> thetas{0.0, M_PI / 3.0, 1.7};
  if (o.theta != 0.0) thetas.assign(1, o.theta);
  for (int n : o.n_list) {
    for (double theta : thetas) {
      uint64_t stream = sep::hash_combine(o.seed, static_cast<uint64_t>(n));
      stream = sep::hash_combine(
          stream, static_cast<uint64_t>(std::llround(theta * 4096.0)));
      double ks = sep::clt_check(n, theta, static_cast<uint64_t>(o.replicas),
                                 stream, o.threads);
      w.row({std::to_string(n), format_number(theta),
             std::to_string(o.replicas), format_number(ks)});
    }
  }
  return 0;
}

// --- tails ---------------------------------------------------------------

int run_tails(const Options& o) {
  RowWriter w(o.out, o.format, "tails", o.seed, config_hash("tails", o),
              {"N", "alpha", "s", "bound", "frequency", "wilson_low",
               "wilson_high", "pass"});
  for (int n : o.n_list) {
    sep::TiltedMeasureSpec spec{n, o.alpha_set ? o.alpha : 0.0, o.theta};
    sep::LipschitzFunctional f;
    f.theta = o.theta;
    sep::SourceDistribution src = o.alpha_set && o.alpha != 0.0
                                      ? sep::SourceDistribution::tilted
                                      : sep::SourceDistribution::uniform;
    uint64_t stream = sep::hash_combine(o.seed, static_cast<uint64_t>(n));
    auto report = sep::lipschitz_tail_check(
        f, spec, src, static_cast<uint64_t>(o.replicas), stream);
    for (const auto& row : report.rows) {
      w.row({std::to_string(n), format_number(spec.alpha),
             format_number(row.s), format_number(row.bound),
             format_number(row.frequency), format_number(row.wilson_low),
             format_number(row.wilson_high), row.pass ? "1" : "0"});
    }
  }
  return 0;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--n", o.n_list, "ring half-size N (repeatable)")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--s-grid", o.s_grid, "cutoff window coordinates s")
      ->delimiter(',');
  cmd->add_option("--gamma-grid", o.gamma_grid, "tilt strengths gamma")
      ->delimiter(',');
  cmd->add_option("--t-grid", o.t_grid, "explicit time grid")->delimiter(',');
  auto* a = cmd->add_option("--alpha", o.alpha, "tilt parameter alpha");
  cmd->callback([&o, a] { o.alpha_set = a->count() > 0; });
  cmd->add_option("--theta", o.theta, "tilt phase theta");
  cmd->add_option("--replicas", o.replicas, "replica / sample count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "master seed (expands per replica)");
  cmd->add_option("--out", o.out, "output path (default stdout)");
  cmd->add_option("--format", o.format, "csv or json-lines")
      ->check(CLI::IsMember({"csv", "json-lines"}));
  cmd->add_option("--threads", o.threads, "worker threads");
  cmd->add_option("--t-max", o.t_max, "censoring horizon (coalesce)");
  // consumed before parsing; registered so it shows up in --help
  cmd->add_option("--config", o.config_file,
                  "flat key=value config file; flags override");
}

// Flat key=value configuration: file entries become flags, but only for
// keys the command line did not set, so explicit flags always win.
std::vector<std::string> splice_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return rest;
  std::ifstream file(config_path);
  if (!file) throw std::runtime_error("cannot read config file: " + config_path);

  std::vector<std::string> user_keys;
  for (const std::string& a : rest)
    if (a.rfind("--", 0) == 0) user_keys.push_back(a.substr(2, a.find('=') - 2));

  std::vector<std::string> out;
  if (!rest.empty()) out.push_back(rest.front());  // subcommand first
  std::string line;
  while (std::getline(file, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      auto end = s.find_last_not_of(" \t\r");
      s.erase(end == std::string::npos ? 0 : end + 1);
      return s;
    };
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config") continue;
    if (std::find(user_keys.begin(), user_keys.end(), key) != user_keys.end())
      continue;
    out.push_back("--" + key);
    if (!value.empty()) out.push_back(value);
  }
  out.insert(out.end(), rest.begin() + (rest.empty() ? 0 : 1), rest.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simple exclusion process mixing experiments"};
  app.require_subcommand(1);
  Options opt[6];
  const char* names[6] = {"profile", "tvnu", "coalesce", "exact", "clt",
                          "tails"};
  const char* descriptions[6] = {
      "cutoff-profile lower bound from the slow statistic",
      "TV(nu^{N,gamma/sqrt(N)}, uniform) vs erf(gamma/sqrt(8))",
      "coupled-triple coalescence times",
      "exact small-N distance and tilted comparisons",
      "KS distance of a_theta/sqrt(N) to the standard normal",
      "Lipschitz concentration tail bounds"};
  CLI::App* cmds[6];
  for (int i = 0; i < 6; ++i) {
    cmds[i] = app.add_subcommand(names[i], descriptions[i]);
    add_common(cmds[i], opt[i]);
  }
  std::vector<std::string> spliced;
  try {
    spliced = splice_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::vector<const char*> cargv{argv[0]};
  for (const std::string& s : spliced) cargv.push_back(s.c_str());
  CLI11_PARSE(app, static_cast<int>(cargv.size()), cargv.data());
  try {
    if (cmds[0]->parsed()) return run_profile(opt[0]);
    if (cmds[1]->parsed()) return run_tvnu(opt[1]);
    if (cmds[2]->parsed()) return run_coalesce(opt[2]);
    if (cmds[3]->parsed()) return run_exact(opt[3]);
    if (cmds[4]->parsed()) return run_clt(opt[4]);
    if (cmds[5]->parsed()) return run_tails(opt[5]);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
