#include "zalms/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "zalms/rng.hpp"

namespace zalms {
namespace {

constexpr std::uint64_t kStreamSystem = 1;
constexpr std::uint64_t kStreamInput = 2;
constexpr std::uint64_t kStreamNoise = 3;

constexpr double kInfinity = std::numeric_limits<double>::infinity();

std::string fmt10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string sanitize(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  }
  return out;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.systems.empty()) throw config_error("config: no system specified");
  if (cfg.algorithms.empty()) throw config_error("config: no algorithms");
  if (cfg.trials < 1) throw config_error("config: trials must be >= 1");
  if (cfg.record_every < 1) throw config_error("config: record_every must be >= 1");
  if (!(cfg.tail_fraction > 0.0) || !(cfg.tail_fraction <= 1.0)) {
    throw config_error("config: tail_fraction must be in (0, 1]");
  }
  std::size_t prev = 0;
  for (std::size_t i = 0; i < cfg.regenerate_at.size(); ++i) {
    const std::size_t r = cfg.regenerate_at[i];
    if (r == 0 || r >= cfg.iterations || (i > 0 && r <= prev)) {
      throw config_error("config: regenerate_at must be strictly increasing and < iterations");
    }
    if (r % cfg.record_every != 0) {
      throw config_error("config: regenerate_at points must align with record_every");
    }
    prev = r;
  }
  for (const auto& alg : cfg.algorithms) {
    try {
      validate(alg.params);
    } catch (const std::exception& e) {
      throw config_error("config: algorithm '" + alg.name + "': " + e.what());
    }
  }
  std::vector<std::string> names;
  for (const auto& sys : cfg.systems) {
    for (const auto& alg : cfg.algorithms) {
      std::string key = alg.name;
      if (!sys.label.empty()) key += "@" + sys.label;
      if (std::find(names.begin(), names.end(), key) != names.end()) {
        throw config_error("config: duplicate curve name: " + key);
      }
      names.push_back(std::move(key));
    }
  }
}

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  if (threads > n) threads = static_cast<unsigned>(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct TrialOut {
  std::vector<double> msd;
  std::vector<double> e2;
  std::vector<double> attr;
  std::vector<double> nmsd;
  std::uint64_t checksum = 0;
  bool diverged = false;
};

struct TheoryMap {
  bool applicable = false;
  TheoryInputs inputs;
};

TheoryMap theory_inputs_for(const ExperimentConfig& cfg, const SystemVariant& sys,
                            const AlgorithmEntry& alg) {
  TheoryMap m;
  if (sys.spec.family != SystemFamily::GgdNearSparse) return m;
  if (sys.spec.ggd.mean != 0.0) return m;
  if (cfg.input.kind != InputKind::WhiteGaussian) return m;
  TheoryInputs ti;
  ti.L = sys.spec.L;
  ti.sigma_x2 = cfg.input.power;
  ti.sigma_v2 = cfg.noise.variance;
  ti.ggd = sys.spec.ggd;
  if (const auto* p = std::get_if<DwzaLms>(&alg.params)) {
    ti.mu = p->mu;
    ti.rho = p->rho;
    ti.a = p->a;
    ti.b = p->b;
  } else if (const auto* p = std::get_if<Lms>(&alg.params)) {
    ti.mu = p->mu;
    ti.rho = 0.0;
    ti.a = 0.0;
    ti.b = kInfinity;
  } else {
    return m;  // the mean-square analysis covers the un-normalized form only
  }
  m.applicable = true;
  m.inputs = ti;
  return m;
}

void append_header(std::ostream& os, const ExperimentReport& rep,
                   const ExperimentConfig& cfg) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(rep.config_hash));
  os << "# config-hash=" << buf << " trials=" << cfg.trials
     << " record_every=" << cfg.record_every << "\n";
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, unsigned threads) {
  validate_config(cfg);

  const std::size_t n_sys = cfg.systems.size();
  const std::size_t n_alg = cfg.algorithms.size();
  const std::size_t n_slots = n_sys * n_alg;
  const std::size_t N = cfg.iterations;

  // Segment boundaries: [0, r1, ..., rk, N].
  std::vector<std::size_t> bounds{0};
  for (std::size_t r : cfg.regenerate_at) bounds.push_back(r);
  bounds.push_back(N);

  std::vector<std::vector<TrialOut>> results(n_slots);
  for (auto& slot : results) slot.resize(cfg.trials);

  parallel_for(cfg.trials, threads, [&](std::size_t t) {
    InputSpec is = cfg.input;
    is.seed = derive_seed(cfg.base_seed, kStreamInput, t);
    NoiseSpec ns = cfg.noise;
    ns.seed = derive_seed(cfg.base_seed, kStreamNoise, t);
    const std::vector<double> x = gen_input(is, N);
    const std::vector<double> v = gen_noise(ns, N);

    for (std::size_t vi = 0; vi < n_sys; ++vi) {
      const SystemSpec& spec = cfg.systems[vi].spec;
      const std::size_t L = spec.L;
      const std::size_t n_segs = bounds.size() - 1;
      std::vector<SystemModel> h(n_segs);
      std::vector<double> h_norm2(n_segs, 0.0);
      for (std::size_t s = 0; s < n_segs; ++s) {
        h[s] = generate_system(
            spec, derive_seed(cfg.base_seed, kStreamSystem, t,
                              (static_cast<std::uint64_t>(vi) << 32) | s));
        for (double tap : h[s].taps) h_norm2[s] += tap * tap;
      }

      // Desired output with the active system per segment; the input keeps
      // its full history across regeneration points.
      std::vector<double> d(N);
      for (std::size_t s = 0; s < n_segs; ++s) {
        const auto& taps = h[s].taps;
        for (std::size_t n = bounds[s]; n < bounds[s + 1]; ++n) {
          double acc = 0.0;
          const std::size_t imax = std::min(n + 1, L);
          for (std::size_t i = 0; i < imax; ++i) acc += taps[i] * x[n - i];
          d[n] = acc + v[n];
        }
      }

      for (std::size_t ai = 0; ai < n_alg; ++ai) {
        TrialOut& out = results[vi * n_alg + ai][t];
        try {
          FilterState st = init_state(L);
          std::uint64_t hash = kStreamHashInit;
          for (std::size_t s = 0; s < n_segs; ++s) {
            const std::size_t lo = bounds[s];
            const std::size_t hi = bounds[s + 1];
            const RunTrace tr =
                run(st, cfg.algorithms[ai].params,
                    std::span<const double>(x).subspan(lo, hi - lo),
                    std::span<const double>(d).subspan(lo, hi - lo),
                    h[s], cfg.record_every, hash);
            hash = tr.consumed_hash;
            const double inv_h = 1.0 / std::max(h_norm2[s], 1e-300);
            out.msd.insert(out.msd.end(), tr.msd.begin(), tr.msd.end());
            out.e2.insert(out.e2.end(), tr.err2.begin(), tr.err2.end());
            out.attr.insert(out.attr.end(), tr.attracted.begin(), tr.attracted.end());
            for (double m : tr.msd) out.nmsd.push_back(m * inv_h);
          }
          out.checksum = hash;
        } catch (const divergence_error&) {
          out.diverged = true;
          out.checksum = 0;
        }
      }
    }
  });

  ExperimentReport rep;
  rep.config_hash = config_hash(cfg);
  rep.trials = cfg.trials;

  std::vector<std::uint64_t> trial_seeds(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    trial_seeds[t] = derive_seed(cfg.base_seed, kStreamInput, t);
  }

  for (std::size_t vi = 0; vi < n_sys; ++vi) {
    for (std::size_t ai = 0; ai < n_alg; ++ai) {
      const auto& slot = results[vi * n_alg + ai];
      CurveEntry entry;
      entry.name = cfg.algorithms[ai].name;
      if (!cfg.systems[vi].label.empty()) entry.name += "@" + cfg.systems[vi].label;

      std::vector<std::vector<double>> msds, e2s, attrs, nmsds;
      std::vector<std::uint64_t> used_seeds;
      entry.stream_checksums.reserve(cfg.trials);
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        entry.stream_checksums.push_back(slot[t].checksum);
        if (slot[t].diverged) {
          ++entry.diverged;
          continue;
        }
        msds.push_back(slot[t].msd);
        e2s.push_back(slot[t].e2);
        attrs.push_back(slot[t].attr);
        nmsds.push_back(slot[t].nmsd);
        used_seeds.push_back(trial_seeds[t]);
      }
      if (!msds.empty()) {
        entry.curve = average_curves(msds, used_seeds, cfg.record_every);
        const std::size_t len = entry.curve.msd.size();
        entry.curve.mse_hat.assign(len, 0.0);
        entry.curve.attracted.assign(len, 0.0);
        entry.nmsd.assign(len, 0.0);
        const double inv = 1.0 / static_cast<double>(msds.size());
        for (std::size_t k = 0; k < msds.size(); ++k) {
          for (std::size_t i = 0; i < len; ++i) {
            entry.curve.mse_hat[i] += e2s[k][i];
            entry.curve.attracted[i] += attrs[k][i];
            entry.nmsd[i] += nmsds[k][i];
          }
        }
        for (std::size_t i = 0; i < len; ++i) {
          entry.curve.mse_hat[i] *= inv;
          entry.curve.attracted[i] *= inv;
          entry.nmsd[i] *= inv;
        }
      } else {
        entry.curve.trials = 0;
        entry.curve.record_every = cfg.record_every;
      }

      std::optional<std::uint64_t> crossing;
      if (!entry.curve.msd.empty()) {
        crossing = first_crossing_db(entry.curve.msd, cfg.convergence_db,
                                     cfg.record_every);
      }
      rep.convergence_iters.emplace_back(entry.name, crossing);

      const TheoryMap tm = theory_inputs_for(cfg, cfg.systems[vi], cfg.algorithms[ai]);
      if (tm.applicable) {
        TheoryEntry te;
        te.name = entry.name;
        try {
          te.prediction = steady_state_mse(tm.inputs);
        } catch (const theory_out_of_range& e) {
          te.note = e.what();
        }
        rep.theory.push_back(std::move(te));
      }

      rep.curves.push_back(std::move(entry));
    }
  }

  if (!cfg.output_dir.empty()) {
    emit_csv(cfg, rep, cfg.output_dir);
  }
  return rep;
}

std::vector<TheoryComparisonRow> compare_theory(const ExperimentConfig& cfg,
                                                const ExperimentReport& report) {
  std::vector<TheoryComparisonRow> rows;
  for (const auto& te : report.theory) {
    const CurveEntry* ce = nullptr;
    for (const auto& c : report.curves) {
      if (c.name == te.name) {
        ce = &c;
        break;
      }
    }
    if (!ce || ce->curve.mse_hat.empty()) continue;
    TheoryComparisonRow row;
    row.name = te.name;
    row.sim_mse = steady_state_estimate(std::span<const double>(ce->curve.mse_hat),
                                        cfg.tail_fraction)
                      .first;
    if (te.prediction) {
      row.pred_mse = te.prediction->mse;
      row.ratio = row.sim_mse / row.pred_mse;
      row.outside_band = row.ratio < 0.7 || row.ratio > 1.4;
    } else {
      row.out_of_range = true;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// --- configuration text form ------------------------------------------------

namespace {

const char* input_kind_name(InputKind k) {
  return k == InputKind::WhiteGaussian ? "white" : "ar1";
}

void write_system_fields(std::ostream& os, const std::string& prefix,
                         const SystemVariant& sv) {
  os << prefix << "family = " << family_name(sv.spec.family) << "\n";
  if (!sv.label.empty()) os << prefix << "label = " << sv.label << "\n";
  os << prefix << "L = " << sv.spec.L << "\n";
  switch (sv.spec.family) {
    case SystemFamily::ExactSparse:
      os << prefix << "K = " << sv.spec.K << "\n";
      os << prefix << "amp_sigma = " << fmt17(sv.spec.amp_sigma) << "\n";
      break;
    case SystemFamily::NoisySparse:
      os << prefix << "K = " << sv.spec.K << "\n";
      os << prefix << "amp_sigma = " << fmt17(sv.spec.amp_sigma) << "\n";
      os << prefix << "floor_var = " << fmt17(sv.spec.floor_var) << "\n";
      break;
    case SystemFamily::GgdNearSparse:
      os << prefix << "mean = " << fmt17(sv.spec.ggd.mean) << "\n";
      os << prefix << "sigma_g = " << fmt17(sv.spec.ggd.sigma_g) << "\n";
      os << prefix << "beta = " << fmt17(sv.spec.ggd.beta) << "\n";
      break;
    case SystemFamily::GaussianNonSparse:
      os << prefix << "sigma = " << fmt17(sv.spec.gauss_sigma) << "\n";
      break;
  }
}

struct AlgFields {
  double mu = 0.0, rho = 0.0, a = 0.0, b = kInfinity, eps = 1e-6;
  bool has_rho = false, has_a = false, has_b = false, has_eps = false;
};

AlgFields alg_fields(const AlgorithmParams& p) {
  AlgFields f;
  std::visit(
      [&](const auto& v) {
        using P = std::decay_t<decltype(v)>;
        f.mu = v.mu;
        if constexpr (std::is_same_v<P, ZaLms> || std::is_same_v<P, DzaLms>) {
          f.rho = v.rho;
          f.has_rho = true;
        } else if constexpr (std::is_same_v<P, ZaNlms>) {
          f.rho = v.rho;
          f.eps = v.eps;
          f.has_rho = f.has_eps = true;
        } else if constexpr (std::is_same_v<P, WzaLms> || std::is_same_v<P, DwzaLms>) {
          f.rho = v.rho;
          f.a = v.a;
          f.b = v.b;
          f.has_rho = f.has_a = f.has_b = true;
        } else if constexpr (std::is_same_v<P, DwzaNlms>) {
          f.rho = v.rho;
          f.a = v.a;
          f.b = v.b;
          f.eps = v.eps;
          f.has_rho = f.has_a = f.has_b = f.has_eps = true;
        } else if constexpr (std::is_same_v<P, Nlms>) {
          f.eps = v.eps;
          f.has_eps = true;
        }
      },
      p);
  return f;
}

}  // namespace

std::string write_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "base_seed = " << cfg.base_seed << "\n";
  os << "convergence_db = " << fmt17(cfg.convergence_db) << "\n";
  os << "input.kind = " << input_kind_name(cfg.input.kind) << "\n";
  os << "input.power = " << fmt17(cfg.input.power) << "\n";
  if (cfg.input.kind == InputKind::Ar1) {
    os << "input.ar_coeff = " << fmt17(cfg.input.ar_coeff) << "\n";
  }
  os << "iterations = " << cfg.iterations << "\n";
  os << "noise.variance = " << fmt17(cfg.noise.variance) << "\n";
  os << "record_every = " << cfg.record_every << "\n";
  if (!cfg.regenerate_at.empty()) {
    os << "regenerate_at = ";
    for (std::size_t i = 0; i < cfg.regenerate_at.size(); ++i) {
      if (i) os << ",";
      os << cfg.regenerate_at[i];
    }
    os << "\n";
  }
  os << "tail_fraction = " << fmt17(cfg.tail_fraction) << "\n";
  os << "trials = " << cfg.trials << "\n";
  if (cfg.systems.size() == 1) {
    write_system_fields(os, "system.", cfg.systems[0]);
  } else {
    for (std::size_t i = 0; i < cfg.systems.size(); ++i) {
      write_system_fields(os, "system." + std::to_string(i + 1) + ".",
                          cfg.systems[i]);
    }
  }
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
    const std::string prefix = "alg." + std::to_string(i + 1) + ".";
    const auto& alg = cfg.algorithms[i];
    os << prefix << "kind = " << algorithm_name(alg.params) << "\n";
    os << prefix << "name = " << alg.name << "\n";
    const AlgFields f = alg_fields(alg.params);
    os << prefix << "mu = " << fmt17(f.mu) << "\n";
    if (f.has_rho) os << prefix << "rho = " << fmt17(f.rho) << "\n";
    if (f.has_a) os << prefix << "a = " << fmt17(f.a) << "\n";
    if (f.has_b) os << prefix << "b = " << fmt17(f.b) << "\n";
    if (f.has_eps) os << prefix << "eps = " << fmt17(f.eps) << "\n";
  }
  return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string text = write_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

// --- config file parsing ------------------------------------------------------

namespace {

double parse_double(const std::string& key, const std::string& val) {
  if (val == "inf") return kInfinity;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(val, &used);
  } catch (const std::exception&) {
    throw config_error("config: bad number for " + key + ": " + val);
  }
  if (used != val.size()) {
    throw config_error("config: bad number for " + key + ": " + val);
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& val) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(val, &used);
  } catch (const std::exception&) {
    throw config_error("config: bad integer for " + key + ": " + val);
  }
  if (used != val.size()) {
    throw config_error("config: bad integer for " + key + ": " + val);
  }
  return v;
}

struct AlgBuilder {
  std::string kind;
  std::string name;
  AlgFields f;
  bool has_mu = false;
};

AlgorithmParams build_alg(const AlgBuilder& b) {
  const auto& f = b.f;
  if (b.kind == "lms") return Lms{f.mu};
  if (b.kind == "nlms") return Nlms{f.mu, f.eps};
  if (b.kind == "za_lms") return ZaLms{f.mu, f.rho};
  if (b.kind == "za_nlms") return ZaNlms{f.mu, f.rho, f.eps};
  if (b.kind == "wza_lms") return WzaLms{f.mu, f.rho, f.a, f.b};
  if (b.kind == "dza_lms") return DzaLms{f.mu, f.rho};
  if (b.kind == "dwza_lms") return DwzaLms{f.mu, f.rho, f.a, f.b};
  if (b.kind == "dwza_nlms") return DwzaNlms{f.mu, f.rho, f.a, f.b, f.eps};
  throw config_error("config: unknown algorithm kind: " + b.kind);
}

void apply_system_key(SystemVariant& sv, const std::string& field,
                      const std::string& key, const std::string& val) {
  if (field == "family") {
    try {
      sv.spec.family = family_from_name(val);
    } catch (const std::exception& e) {
      throw config_error(std::string("config: ") + e.what());
    }
  } else if (field == "label") {
    sv.label = val;
  } else if (field == "L") {
    sv.spec.L = static_cast<std::size_t>(parse_u64(key, val));
  } else if (field == "K") {
    sv.spec.K = static_cast<std::size_t>(parse_u64(key, val));
  } else if (field == "amp_sigma") {
    sv.spec.amp_sigma = parse_double(key, val);
  } else if (field == "floor_var") {
    sv.spec.floor_var = parse_double(key, val);
  } else if (field == "mean") {
    sv.spec.ggd.mean = parse_double(key, val);
  } else if (field == "sigma_g") {
    sv.spec.ggd.sigma_g = parse_double(key, val);
  } else if (field == "beta") {
    sv.spec.ggd.beta = parse_double(key, val);
  } else if (field == "sigma") {
    sv.spec.gauss_sigma = parse_double(key, val);
  } else {
    throw config_error("config: unknown key: " + key);
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  cfg.systems.clear();
  std::map<std::size_t, SystemVariant> sys_by_idx;
  SystemVariant single_sys;
  bool has_single_sys = false;
  bool has_indexed_sys = false;
  std::map<std::size_t, AlgBuilder> algs;

  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error("config: line " + std::to_string(lineno) +
                         " is not key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) {
      throw config_error("config: empty key or value at line " +
                         std::to_string(lineno));
    }

    if (key == "iterations") {
      cfg.iterations = static_cast<std::size_t>(parse_u64(key, val));
    } else if (key == "trials") {
      cfg.trials = static_cast<std::size_t>(parse_u64(key, val));
    } else if (key == "base_seed") {
      cfg.base_seed = parse_u64(key, val);
    } else if (key == "record_every") {
      cfg.record_every = static_cast<std::size_t>(parse_u64(key, val));
    } else if (key == "convergence_db") {
      cfg.convergence_db = parse_double(key, val);
    } else if (key == "tail_fraction") {
      cfg.tail_fraction = parse_double(key, val);
    } else if (key == "output_dir") {
      cfg.output_dir = val;
    } else if (key == "regenerate_at") {
      std::istringstream rs(val);
      std::string tok;
      while (std::getline(rs, tok, ',')) {
        cfg.regenerate_at.push_back(
            static_cast<std::size_t>(parse_u64(key, tok)));
      }
    } else if (key == "input.kind") {
      if (val == "white") {
        cfg.input.kind = InputKind::WhiteGaussian;
      } else if (val == "ar1") {
        cfg.input.kind = InputKind::Ar1;
      } else {
        throw config_error("config: input.kind must be white or ar1");
      }
    } else if (key == "input.power") {
      cfg.input.power = parse_double(key, val);
    } else if (key == "input.ar_coeff") {
      cfg.input.ar_coeff = parse_double(key, val);
    } else if (key == "noise.variance") {
      cfg.noise.variance = parse_double(key, val);
    } else if (key.rfind("system.", 0) == 0) {
      const std::string rest = key.substr(7);
      const auto dot = rest.find('.');
      if (dot == std::string::npos) {
        has_single_sys = true;
        apply_system_key(single_sys, rest, key, val);
      } else {
        has_indexed_sys = true;
        const std::size_t idx =
            static_cast<std::size_t>(parse_u64(key, rest.substr(0, dot)));
        apply_system_key(sys_by_idx[idx], rest.substr(dot + 1), key, val);
      }
    } else if (key.rfind("alg.", 0) == 0) {
      const std::string rest = key.substr(4);
      const auto dot = rest.find('.');
      if (dot == std::string::npos) {
        throw config_error("config: algorithm keys are alg.<index>.<field>");
      }
      const std::size_t idx =
          static_cast<std::size_t>(parse_u64(key, rest.substr(0, dot)));
      const std::string field = rest.substr(dot + 1);
      AlgBuilder& b = algs[idx];
      if (field == "kind") {
        b.kind = val;
      } else if (field == "name") {
        b.name = val;
      } else if (field == "mu") {
        b.f.mu = parse_double(key, val);
        b.has_mu = true;
      } else if (field == "rho") {
        b.f.rho = parse_double(key, val);
      } else if (field == "a") {
        b.f.a = parse_double(key, val);
      } else if (field == "b") {
        b.f.b = parse_double(key, val);
      } else if (field == "eps") {
        b.f.eps = parse_double(key, val);
      } else {
        throw config_error("config: unknown key: " + key);
      }
    } else {
      throw config_error("config: unknown key: " + key);
    }
  }

  if (has_single_sys && has_indexed_sys) {
    throw config_error("config: mix of system.* and system.<i>.* keys");
  }
  if (has_single_sys) {
    cfg.systems.push_back(std::move(single_sys));
  } else {
    std::size_t expect = 1;
    for (auto& [idx, sv] : sys_by_idx) {
      if (idx != expect++) {
        throw config_error("config: system indices must be 1..N contiguous");
      }
      cfg.systems.push_back(std::move(sv));
    }
  }
  std::size_t expect = 1;
  for (auto& [idx, b] : algs) {
    if (idx != expect++) {
      throw config_error("config: alg indices must be 1..N contiguous");
    }
    if (b.kind.empty()) {
      throw config_error("config: alg." + std::to_string(idx) + ".kind missing");
    }
    if (!b.has_mu) {
      throw config_error("config: alg." + std::to_string(idx) + ".mu missing");
    }
    AlgorithmEntry entry;
    entry.params = build_alg(b);
    entry.name = b.name.empty() ? algorithm_name(entry.params) : b.name;
    cfg.algorithms.push_back(std::move(entry));
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

// --- presets -----------------------------------------------------------------

namespace {

ExperimentConfig base_config() {
  ExperimentConfig cfg;
  cfg.input.kind = InputKind::WhiteGaussian;
  cfg.input.power = 1.0;
  cfg.noise.variance = 1e-4;
  cfg.base_seed = 1;
  cfg.record_every = 1;
  cfg.trials = 100;
  return cfg;
}

SystemVariant ggd_system(double beta, const std::string& label = "") {
  SystemVariant sv;
  sv.label = label;
  sv.spec.family = SystemFamily::GgdNearSparse;
  sv.spec.L = 100;
  sv.spec.ggd = GgdParams{0.0, 1.0, beta};
  return sv;
}

SystemVariant noisy_sparse_system() {
  SystemVariant sv;
  sv.spec.family = SystemFamily::NoisySparse;
  sv.spec.L = 100;
  sv.spec.K = 8;
  sv.spec.amp_sigma = 1.0;
  sv.spec.floor_var = 1e-4;
  return sv;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"exp1_white", "exp1_ar", "exp2",    "exp3",    "exp4",
          "exp5",       "exp6_mu", "exp6_rho", "exp7_a", "exp7_b"};
}

ExperimentConfig preset(const std::string& name) {
  constexpr double kEps = 1e-6;
  ExperimentConfig cfg = base_config();

  if (name == "exp1_white" || name == "exp1_ar") {
    cfg.systems = {ggd_system(0.05)};
    cfg.trials = 100;
    if (name == "exp1_white") {
      cfg.iterations = 3400;
      cfg.regenerate_at = {1700};
      cfg.algorithms = {
          {"nlms", Nlms{1.0, kEps}},
          {"za_nlms", ZaNlms{1.0, 3e-4, kEps}},
          {"dwza_nlms", DwzaNlms{1.0, 6e-2, 1e-3, 0.8, kEps}},
      };
    } else {
      cfg.input.kind = InputKind::Ar1;
      cfg.input.ar_coeff = 0.8;
      cfg.iterations = 9000;
      cfg.regenerate_at = {4500};
      cfg.algorithms = {
          {"nlms", Nlms{1.0, kEps}},
          {"za_nlms", ZaNlms{1.0, 3e-4, kEps}},
          {"dwza_nlms", DwzaNlms{1.0, 3e-2, 1e-3, 0.8, kEps}},
      };
    }
    return cfg;
  }
  if (name == "exp2") {
    cfg.systems = {noisy_sparse_system()};
    cfg.iterations = 2000;
    cfg.algorithms = {
        {"nlms", Nlms{1.0, kEps}},
        {"za_nlms", ZaNlms{1.0, 3e-4, kEps}},
        {"dwza_nlms", DwzaNlms{1.0, 6e-2, 1e-2, 0.8, kEps}},
    };
    return cfg;
  }
  if (name == "exp3") {
    cfg.systems = {noisy_sparse_system()};
    cfg.iterations = 2000;
    cfg.algorithms = {
        {"za_nlms", ZaNlms{1.0, 6.5e-4, kEps}},
        // The dynamic-only variant is the windowed rule with the window open.
        {"dza_nlms", DwzaNlms{1.0, 0.05, 0.0, kInfinity, kEps}},
        {"dwza_nlms", DwzaNlms{1.0, 0.05, 1e-2, 0.8, kEps}},
    };
    return cfg;
  }
  if (name == "exp4") {
    SystemVariant sv;
    sv.spec.family = SystemFamily::ExactSparse;
    sv.spec.L = 100;
    sv.spec.K = 8;
    sv.spec.amp_sigma = 1.0;
    cfg.systems = {sv};
    cfg.iterations = 2000;
    cfg.algorithms = {
        {"nlms", Nlms{0.65, kEps}},
        {"za_nlms", ZaNlms{1.0, 6e-4, kEps}},
        {"dwza_nlms", DwzaNlms{1.0, 6e-2, 0.0, 0.8, kEps}},
    };
    return cfg;
  }
  if (name == "exp5") {
    cfg.systems = {ggd_system(0.05, "beta005"), ggd_system(0.1, "beta01"),
                   ggd_system(0.15, "beta015")};
    SystemVariant gauss;
    gauss.label = "gauss";
    gauss.spec.family = SystemFamily::GaussianNonSparse;
    gauss.spec.L = 100;
    gauss.spec.gauss_sigma = 1.0;
    cfg.systems.push_back(gauss);
    cfg.trials = 50;
    cfg.iterations = 1700;
    cfg.algorithms = {
        {"nlms", Nlms{1.0, kEps}},
        {"dwza_nlms", DwzaNlms{1.0, 4e-2, 1e-2, 0.8, kEps}},
    };
    return cfg;
  }
  if (name == "exp6_rho") {
    cfg.systems = {ggd_system(0.1)};
    cfg.trials = 50;
    cfg.iterations = 20000;
    cfg.record_every = 10;
    cfg.tail_fraction = 0.25;
    cfg.algorithms = {
        {"dwza_rho0", DwzaLms{1e-2, 0.0, 1e-2, 0.8}},
        {"dwza_rho2e4", DwzaLms{1e-2, 2e-4, 1e-2, 0.8}},
        {"dwza_rho5e4", DwzaLms{1e-2, 5e-4, 1e-2, 0.8}},
        {"dwza_rho1e3", DwzaLms{1e-2, 1e-3, 1e-2, 0.8}},
    };
    return cfg;
  }
  if (name == "exp6_mu") {
    cfg.systems = {ggd_system(0.1)};
    cfg.trials = 50;
    cfg.iterations = 60000;
    cfg.record_every = 20;
    cfg.tail_fraction = 0.2;
    cfg.algorithms = {
        {"dwza_mu2e4", DwzaLms{2e-4, 2e-4, 1e-2, 0.8}},
        {"dwza_mu4e4", DwzaLms{4e-4, 2e-4, 1e-2, 0.8}},
        {"dwza_mu6e4", DwzaLms{6e-4, 2e-4, 1e-2, 0.8}},
        {"dwza_mu8e4", DwzaLms{8e-4, 2e-4, 1e-2, 0.8}},
        {"dwza_mu11e4", DwzaLms{1.1e-3, 2e-4, 1e-2, 0.8}},
    };
    return cfg;
  }
  if (name == "exp7_a") {
    cfg.systems = {noisy_sparse_system()};
    cfg.iterations = 1000;
    cfg.algorithms = {
        {"dwza_a0", DwzaNlms{1.0, 6e-2, 0.0, 0.8, kEps}},
        {"dwza_a1e3", DwzaNlms{1.0, 6e-2, 1e-3, 0.8, kEps}},
        {"dwza_a1e2", DwzaNlms{1.0, 6e-2, 1e-2, 0.8, kEps}},
        {"dwza_a1e1", DwzaNlms{1.0, 6e-2, 1e-1, 0.8, kEps}},
    };
    return cfg;
  }
  if (name == "exp7_b") {
    cfg.systems = {noisy_sparse_system()};
    cfg.iterations = 2000;
    cfg.algorithms = {
        {"dwza_b01", DwzaNlms{1.0, 6e-2, 1e-2, 0.1, kEps}},
        {"dwza_b05", DwzaNlms{1.0, 6e-2, 1e-2, 0.5, kEps}},
        {"dwza_b1", DwzaNlms{1.0, 6e-2, 1e-2, 1.0, kEps}},
        {"dwza_b5", DwzaNlms{1.0, 6e-2, 1e-2, 5.0, kEps}},
    };
    return cfg;
  }
  throw config_error("unknown preset: " + name);
}

// --- CSV emission --------------------------------------------------------------

std::vector<std::string> emit_csv(const ExperimentConfig& cfg,
                                  ExperimentReport& report,
                                  const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("emit_csv: cannot create " + dir);

  std::vector<std::string> files;

  // curves.csv
  {
    const std::string path = (fs::path(dir) / "curves.csv").string();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("emit_csv: cannot open " + path);
    append_header(os, report, cfg);
    os << "iter";
    for (const auto& c : report.curves) os << "," << sanitize(c.name) << "_msd_db";
    for (const auto& c : report.curves) os << "," << sanitize(c.name) << "_nmsd_db";
    os << "\n";
    std::size_t rows = 0;
    for (const auto& c : report.curves) rows = std::max(rows, c.curve.msd.size());
    auto db_cell = [](const std::vector<double>& v, std::size_t i) {
      if (i >= v.size()) return std::string("nan");
      const double x = std::max(v[i], 1e-300);
      return fmt10(10.0 * std::log10(x));
    };
    for (std::size_t i = 0; i < rows; ++i) {
      os << (i + 1) * cfg.record_every;
      for (const auto& c : report.curves) os << "," << db_cell(c.curve.msd, i);
      for (const auto& c : report.curves) os << "," << db_cell(c.nmsd, i);
      os << "\n";
    }
    if (!os) throw std::runtime_error("emit_csv: write failed: " + path);
    files.push_back(path);
  }

  // summary.csv
  {
    const std::string path = (fs::path(dir) / "summary.csv").string();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("emit_csv: cannot open " + path);
    append_header(os, report, cfg);
    os << "name,trials_used,diverged,msd_tail_mean,msd_tail_std,"
          "mse_tail_mean,mse_tail_std,attracted_tail_mean,conv_iter\n";
    for (const auto& c : report.curves) {
      os << sanitize(c.name) << "," << c.curve.trials << "," << c.diverged;
      if (!c.curve.msd.empty()) {
        const auto [mm, ms] = steady_state_estimate(
            std::span<const double>(c.curve.msd), cfg.tail_fraction);
        const auto [em, es] = steady_state_estimate(
            std::span<const double>(c.curve.mse_hat), cfg.tail_fraction);
        const double am = steady_state_estimate(
                              std::span<const double>(c.curve.attracted),
                              cfg.tail_fraction)
                              .first;
        os << "," << fmt10(mm) << "," << fmt10(ms) << "," << fmt10(em) << ","
           << fmt10(es) << "," << fmt10(am);
      } else {
        os << ",nan,nan,nan,nan,nan";
      }
      std::optional<std::uint64_t> conv;
      for (const auto& [n, it] : report.convergence_iters) {
        if (n == c.name) {
          conv = it;
          break;
        }
      }
      if (conv) {
        os << "," << *conv;
      } else {
        os << ",-1";
      }
      os << "\n";
    }
    if (!os) throw std::runtime_error("emit_csv: write failed: " + path);
    files.push_back(path);
  }

  // theory.csv (only when the analysis applied to some entry)
  if (!report.theory.empty()) {
    const std::string path = (fs::path(dir) / "theory.csv").string();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("emit_csv: cannot open " + path);
    append_header(os, report, cfg);
    os << "name,mu_max,p_attract,pred_mse,pred_mse_lms,excess_msd,regime_ok,"
          "sim_mse,ratio,flag\n";
    const auto rows = compare_theory(cfg, report);
    for (const auto& te : report.theory) {
      const TheoryComparisonRow* row = nullptr;
      for (const auto& r : rows) {
        if (r.name == te.name) {
          row = &r;
          break;
        }
      }
      os << sanitize(te.name);
      if (te.prediction) {
        const auto& p = *te.prediction;
        os << "," << fmt10(p.mu_max) << "," << fmt10(p.p_attract) << ","
           << fmt10(p.mse) << "," << fmt10(p.mse_lms) << ","
           << fmt10(p.excess_msd) << "," << (p.regime_ok ? "true" : "false");
      } else {
        os << ",nan,nan,nan,nan,nan,false";
      }
      if (row) {
        os << "," << fmt10(row->sim_mse);
        if (row->out_of_range) {
          os << ",nan,out-of-range";
        } else {
          os << "," << fmt10(row->ratio) << ","
             << (row->outside_band ? "outside-band" : "ok");
        }
      } else {
        os << ",nan,nan,out-of-range";
      }
      os << "\n";
    }
    if (!os) throw std::runtime_error("emit_csv: write failed: " + path);
    files.push_back(path);
  }

  report.files = files;
  return files;
}

}  // namespace zalms
