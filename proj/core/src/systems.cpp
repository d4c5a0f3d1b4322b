#include "zalms/systems.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "zalms/rng.hpp"

namespace zalms {
namespace {

void fill_exact_sparse(Rng& rng, std::vector<double>& taps, std::size_t K,
                       double amp_sigma) {
  const std::size_t L = taps.size();
  std::vector<std::uint32_t> idx(L);
  std::iota(idx.begin(), idx.end(), 0u);
  // Partial Fisher-Yates: after K swaps the prefix holds a uniform
  // without-replacement draw of K positions.
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.below(L - k));
    std::swap(idx[k], idx[j]);
  }
  for (std::size_t k = 0; k < K; ++k) {
    taps[idx[k]] = amp_sigma * rng.gaussian();
  }
}

void check_sparse_args(std::size_t L, std::size_t K, double amp_sigma) {
  if (L < 1) throw std::invalid_argument("system length must be >= 1");
  if (K < 1 || K > L) throw std::invalid_argument("need 1 <= K <= L");
  if (!(amp_sigma > 0.0)) throw std::invalid_argument("amp_sigma must be > 0");
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char* family_name(SystemFamily f) {
  switch (f) {
    case SystemFamily::ExactSparse: return "exact_sparse";
    case SystemFamily::NoisySparse: return "noisy_sparse";
    case SystemFamily::GgdNearSparse: return "ggd";
    case SystemFamily::GaussianNonSparse: return "gaussian";
  }
  throw std::logic_error("unknown system family");
}

SystemFamily family_from_name(const std::string& name) {
  if (name == "exact_sparse") return SystemFamily::ExactSparse;
  if (name == "noisy_sparse") return SystemFamily::NoisySparse;
  if (name == "ggd") return SystemFamily::GgdNearSparse;
  if (name == "gaussian") return SystemFamily::GaussianNonSparse;
  throw std::invalid_argument("unknown system family: " + name);
}

SystemModel gen_exact_sparse(std::uint64_t seed, std::size_t L, std::size_t K,
                             double amp_sigma) {
  check_sparse_args(L, K, amp_sigma);
  SystemModel m;
  m.family = SystemFamily::ExactSparse;
  m.seed = seed;
  m.taps.assign(L, 0.0);
  Rng rng(seed);
  fill_exact_sparse(rng, m.taps, K, amp_sigma);
  m.params = {{"K", static_cast<double>(K)}, {"amp_sigma", amp_sigma}};
  return m;
}

SystemModel gen_noisy_sparse(std::uint64_t seed, std::size_t L, std::size_t K,
                             double amp_sigma, double floor_var) {
  check_sparse_args(L, K, amp_sigma);
  if (!(floor_var > 0.0)) throw std::invalid_argument("floor_var must be > 0");
  SystemModel m;
  m.family = SystemFamily::NoisySparse;
  m.seed = seed;
  m.taps.assign(L, 0.0);
  Rng rng(seed);
  fill_exact_sparse(rng, m.taps, K, amp_sigma);
  const double sd = std::sqrt(floor_var);
  for (auto& t : m.taps) t += sd * rng.gaussian();
  m.params = {{"K", static_cast<double>(K)},
              {"amp_sigma", amp_sigma},
              {"floor_var", floor_var}};
  return m;
}

SystemModel gen_ggd_system(std::uint64_t seed, std::size_t L, const GgdParams& p) {
  if (L < 1) throw std::invalid_argument("system length must be >= 1");
  SystemModel m;
  m.family = SystemFamily::GgdNearSparse;
  m.seed = seed;
  m.taps = sample_ggd(seed, L, p);
  m.params = {{"mean", p.mean}, {"sigma_g", p.sigma_g}, {"beta", p.beta}};
  return m;
}

SystemModel gen_gaussian_system(std::uint64_t seed, std::size_t L, double sigma) {
  if (L < 1) throw std::invalid_argument("system length must be >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  SystemModel m;
  m.family = SystemFamily::GaussianNonSparse;
  m.seed = seed;
  m.taps.resize(L);
  Rng rng(seed);
  for (auto& t : m.taps) t = sigma * rng.gaussian();
  m.params = {{"sigma", sigma}};
  return m;
}

SystemModel generate_system(const SystemSpec& spec, std::uint64_t seed) {
  switch (spec.family) {
    case SystemFamily::ExactSparse:
      return gen_exact_sparse(seed, spec.L, spec.K, spec.amp_sigma);
    case SystemFamily::NoisySparse:
      return gen_noisy_sparse(seed, spec.L, spec.K, spec.amp_sigma, spec.floor_var);
    case SystemFamily::GgdNearSparse:
      return gen_ggd_system(seed, spec.L, spec.ggd);
    case SystemFamily::GaussianNonSparse:
      return gen_gaussian_system(seed, spec.L, spec.gauss_sigma);
  }
  throw std::logic_error("unknown system family");
}

void write_system_csv(std::ostream& os, const SystemModel& m) {
  os << "# family=" << family_name(m.family) << " L=" << m.taps.size()
     << " seed=" << m.seed;
  for (const auto& [k, v] : m.params) os << ' ' << k << '=' << format_value(v);
  os << '\n';
  for (double t : m.taps) os << format_value(t) << '\n';
}

void write_system_csv(const std::string& path, const SystemModel& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("failed to open for writing: " + path);
  write_system_csv(os, m);
  if (!os) throw std::runtime_error("write failed: " + path);
}

SystemModel read_system_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# ", 0) != 0) {
    throw std::runtime_error("system csv: missing '# ' header line");
  }
  SystemModel m;
  std::size_t L = 0;
  bool have_family = false;
  bool have_len = false;
  std::istringstream hs(header.substr(2));
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("system csv: malformed header token: " + tok);
    }
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "family") {
      m.family = family_from_name(val);
      have_family = true;
    } else if (key == "L") {
      L = std::stoull(val);
      have_len = true;
    } else if (key == "seed") {
      m.seed = std::stoull(val);
    } else {
      m.params.emplace_back(key, std::stod(val));
    }
  }
  if (!have_family || !have_len) {
    throw std::runtime_error("system csv: header needs family= and L=");
  }
  m.taps.reserve(L);
  std::string line;
  while (m.taps.size() < L && std::getline(is, line)) {
    if (line.empty()) continue;
    m.taps.push_back(std::stod(line));
  }
  if (m.taps.size() != L) {
    throw std::runtime_error("system csv: tap count does not match header L");
  }
  return m;
}

SystemModel read_system_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("failed to open for reading: " + path);
  return read_system_csv(is);
}

}  // namespace zalms
