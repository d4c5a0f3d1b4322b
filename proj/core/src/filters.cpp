#include "zalms/filters.hpp"

#include "zalms/metrics.hpp"

namespace zalms {
namespace {

void check_window(double a, double b) {
  if (!(a >= 0.0) || !(a < b)) {
    throw std::invalid_argument("attraction window requires 0 <= a < b");
  }
}

void check_common(double mu, double rho) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("mu must be > 0");
  }
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("rho must be >= 0");
  }
}

void check_eps(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
}

}  // namespace

const char* algorithm_name(const AlgorithmParams& p) {
  return std::visit(
      [](const auto& v) -> const char* {
        using P = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<P, Lms>) return "lms";
        else if constexpr (std::is_same_v<P, Nlms>) return "nlms";
        else if constexpr (std::is_same_v<P, ZaLms>) return "za_lms";
        else if constexpr (std::is_same_v<P, ZaNlms>) return "za_nlms";
        else if constexpr (std::is_same_v<P, WzaLms>) return "wza_lms";
        else if constexpr (std::is_same_v<P, DzaLms>) return "dza_lms";
        else if constexpr (std::is_same_v<P, DwzaLms>) return "dwza_lms";
        else return "dwza_nlms";
      },
      p);
}

void validate(const AlgorithmParams& p) {
  std::visit(
      [](const auto& v) {
        using P = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<P, Lms>) {
          check_common(v.mu, 0.0);
        } else if constexpr (std::is_same_v<P, Nlms>) {
          check_common(v.mu, 0.0);
          check_eps(v.eps);
        } else if constexpr (std::is_same_v<P, ZaLms>) {
          check_common(v.mu, v.rho);
        } else if constexpr (std::is_same_v<P, ZaNlms>) {
          check_common(v.mu, v.rho);
          check_eps(v.eps);
        } else if constexpr (std::is_same_v<P, WzaLms>) {
          check_common(v.mu, v.rho);
          check_window(v.a, v.b);
        } else if constexpr (std::is_same_v<P, DzaLms>) {
          check_common(v.mu, v.rho);
        } else if constexpr (std::is_same_v<P, DwzaLms>) {
          check_common(v.mu, v.rho);
          check_window(v.a, v.b);
        } else {
          check_common(v.mu, v.rho);
          check_window(v.a, v.b);
          check_eps(v.eps);
        }
      },
      p);
}

FilterState init_state(std::size_t L, std::optional<std::vector<double>> w0) {
  if (L < 1) throw std::invalid_argument("init_state: L must be >= 1");
  FilterState st;
  if (w0) {
    if (w0->size() != L) {
      throw std::invalid_argument("init_state: w0 length does not match L");
    }
    for (double v : *w0) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("init_state: w0 must be finite");
      }
    }
    st.w = std::move(*w0);
  } else {
    st.w.assign(L, 0.0);
  }
  st.hist.assign(2 * L, 0.0);
  st.pos = L;
  return st;
}

RunTrace run(FilterState& st, const AlgorithmParams& params,
             std::span<const double> x, std::span<const double> d,
             std::span<const double> h_taps, std::size_t record_every,
             std::uint64_t hash_seed) {
  if (x.size() != d.size()) {
    throw std::invalid_argument("run: x and d lengths differ");
  }
  if (record_every == 0) {
    throw std::invalid_argument("run: record_every must be >= 1");
  }
  if (h_taps.size() != st.length()) {
    throw std::invalid_argument("run: system length does not match state");
  }
  validate(params);

  RunTrace tr;
  tr.consumed_hash = hash_seed;
  const std::size_t n_records = x.size() / record_every;
  tr.msd.reserve(n_records);
  tr.err2.reserve(n_records);
  tr.attracted.reserve(n_records);
  const double inv_len = 1.0 / static_cast<double>(st.length());

  for (std::size_t k = 0; k < x.size(); ++k) {
    const StepOutput out = step(st, params, x[k], d[k]);
    tr.consumed_hash = stream_hash_absorb(tr.consumed_hash, x[k]);
    tr.consumed_hash = stream_hash_absorb(tr.consumed_hash, d[k]);
    if ((k + 1) % record_every == 0) {
      tr.msd.push_back(msd(st.w, h_taps));
      tr.err2.push_back(out.error * out.error);
      tr.attracted.push_back(static_cast<double>(out.attracted_count) * inv_len);
    }
  }
  tr.steps = x.size();
  tr.final_msd = msd(st.w, h_taps);
  if (!std::isfinite(tr.final_msd)) {
    st.poisoned = true;
    throw divergence_error("run: coefficients overflowed");
  }
  return tr;
}

RunTrace run(FilterState& st, const AlgorithmParams& params,
             std::span<const double> x, std::span<const double> d,
             const SystemModel& h, std::size_t record_every,
             std::uint64_t hash_seed) {
  return run(st, params, x, d, std::span<const double>(h.taps), record_every,
             hash_seed);
}

}  // namespace zalms
