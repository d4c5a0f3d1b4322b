#ifndef ZALMS_SYSTEMS_HPP
#define ZALMS_SYSTEMS_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "zalms/ggd.hpp"

namespace zalms {

enum class SystemFamily { ExactSparse, NoisySparse, GgdNearSparse, GaussianNonSparse };

const char* family_name(SystemFamily f);
SystemFamily family_from_name(const std::string& name);

/// An unknown impulse response plus the provenance needed to regenerate it:
/// family, family parameters and the seed.  Regenerating with the same seed
/// yields bit-identical taps.
struct SystemModel {
  SystemFamily family = SystemFamily::ExactSparse;
  std::uint64_t seed = 0;
  std::vector<double> taps;
  std::vector<std::pair<std::string, double>> params;  // ordered, for the CSV header

  std::size_t length() const { return taps.size(); }
};

/// K tap positions drawn uniformly without replacement (partial
/// Fisher-Yates), amplitudes i.i.d. N(0, amp_sigma^2), every other tap
/// exactly zero.
SystemModel gen_exact_sparse(std::uint64_t seed, std::size_t L, std::size_t K,
                             double amp_sigma);

/// gen_exact_sparse plus i.i.d. N(0, floor_var) noise on every tap.  The
/// sparse part consumes the generator identically to gen_exact_sparse, so
/// floor_var -> 0 recovers that model tap for tap.
SystemModel gen_noisy_sparse(std::uint64_t seed, std::size_t L, std::size_t K,
                             double amp_sigma, double floor_var);

/// Taps drawn from GGD(p); the near-sparse model.
SystemModel gen_ggd_system(std::uint64_t seed, std::size_t L, const GgdParams& p);

/// Non-sparse reference: taps i.i.d. N(0, sigma^2).
SystemModel gen_gaussian_system(std::uint64_t seed, std::size_t L, double sigma);

/// Declarative form of the above, used by experiment configuration.
struct SystemSpec {
  SystemFamily family = SystemFamily::GgdNearSparse;
  std::size_t L = 100;
  std::size_t K = 8;          // sparse families
  double amp_sigma = 1.0;     // sparse families
  double floor_var = 1e-4;    // noisy sparse
  GgdParams ggd{};            // GGD family
  double gauss_sigma = 1.0;   // Gaussian family
};

SystemModel generate_system(const SystemSpec& spec, std::uint64_t seed);

/// CSV serialization: a `# family=<name> L=<int> seed=<u64> k=v ...` header
/// line, then one tap per line with 17 significant digits (round-trip exact
/// for 64-bit floats).
void write_system_csv(std::ostream& os, const SystemModel& m);
void write_system_csv(const std::string& path, const SystemModel& m);
SystemModel read_system_csv(std::istream& is);
SystemModel read_system_csv(const std::string& path);

}  // namespace zalms

#endif  // ZALMS_SYSTEMS_HPP
