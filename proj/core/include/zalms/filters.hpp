#ifndef ZALMS_FILTERS_HPP
#define ZALMS_FILTERS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "zalms/systems.hpp"

namespace zalms {

inline constexpr double kInfThreshold = std::numeric_limits<double>::infinity();

/// Raised when a filter update produces (or consumes) non-finite values.
/// The state is poisoned and refuses further stepping.
class divergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One struct per update rule.  mu is the step size, rho the zero-point
// attraction strength, (a, b] the attraction window on |w_i|, eps the
// normalization regularizer.  DzaLms has the window pinned at a=0, b=inf.
struct Lms      { double mu = 0.01; };
struct Nlms     { double mu = 1.0;  double eps = 1e-6; };
struct ZaLms    { double mu = 0.01; double rho = 0.0; };
struct ZaNlms   { double mu = 1.0;  double rho = 0.0; double eps = 1e-6; };
struct WzaLms   { double mu = 0.01; double rho = 0.0; double a = 0.0; double b = kInfThreshold; };
struct DzaLms   { double mu = 0.01; double rho = 0.0; };
struct DwzaLms  { double mu = 0.01; double rho = 0.0; double a = 0.0; double b = kInfThreshold; };
struct DwzaNlms { double mu = 1.0;  double rho = 0.0; double a = 0.0; double b = kInfThreshold; double eps = 1e-6; };

using AlgorithmParams = std::variant<Lms, Nlms, ZaLms, ZaNlms, WzaLms, DzaLms,
                                     DwzaLms, DwzaNlms>;

const char* algorithm_name(const AlgorithmParams& p);
void validate(const AlgorithmParams& p);  // throws std::invalid_argument

/// Component-wise partial sign: sgn(t) for a < |t| <= b, else 0.  The lower
/// threshold is excluded and the upper included; (a, b) = (0, inf) recovers
/// the plain sign with partial_sign(0, ...) = 0.
inline int partial_sign(double t, double a, double b) {
  if (!(a >= 0.0) || !(a < b)) {
    throw std::invalid_argument("partial_sign requires 0 <= a < b");
  }
  const double m = std::fabs(t);
  if (m > a && m <= b) return (t > 0.0) - (t < 0.0);
  return 0;
}

struct StepOutput {
  double error = 0.0;            // e(n) = d(n) - y(n)
  double y = 0.0;                // filter output w^T x
  std::size_t attracted_count = 0;  // taps the attractor acted on this step
};

/// Adaptive filter state: coefficients plus the input history window
/// x(n) ... x(n-L+1).  The history lives in a doubled buffer so the window
/// stays contiguous with amortized O(1) pushes; `xpow` tracks the window
/// energy x^T x incrementally.
struct FilterState {
  std::vector<double> w;
  std::vector<double> hist;  // size 2L; active window is hist[pos, pos+L)
  std::size_t pos = 0;
  double xpow = 0.0;
  std::uint64_t n = 0;       // completed iterations
  bool poisoned = false;

  std::size_t length() const { return w.size(); }

  std::span<const double> window() const {
    return {hist.data() + pos, w.size()};
  }

  void push(double x_new) {
    const std::size_t L = w.size();
    const double leaving = hist[pos + L - 1];
    if (pos == 0) {
      std::copy_backward(hist.begin(), hist.begin() + static_cast<std::ptrdiff_t>(L),
                         hist.begin() + static_cast<std::ptrdiff_t>(2 * L));
      pos = L;
    }
    --pos;
    hist[pos] = x_new;
    xpow += x_new * x_new - leaving * leaving;
  }
};

/// Zeroed state of length L, or with coefficients w0 when given.
FilterState init_state(std::size_t L,
                       std::optional<std::vector<double>> w0 = std::nullopt);

/// Per-tap operation tally for the structural complexity assertions.
/// `step` itself uses the no-op variant, which compiles away.
struct StepCounts {
  std::uint64_t conv_mul = 0;        // multiplies in the w^T x convolution
  std::uint64_t update_mul = 0;      // per-tap multiplies in the update
  std::uint64_t attractor_madd = 0;  // attraction adds actually applied
  std::uint64_t window_pairs = 0;    // (|w|>a, |w|<=b) comparison pairs
  std::uint64_t abs_e = 0;           // |e| evaluations
};

namespace detail {

struct NoTally {
  static void conv_mul(std::size_t) {}
  static void update_mul(std::size_t) {}
  static void attractor_madd(std::size_t) {}
  static void window_pairs(std::size_t) {}
  static void abs_e(std::size_t) {}
};

struct CountTally {
  StepCounts* c;
  void conv_mul(std::size_t k) const { c->conv_mul += k; }
  void update_mul(std::size_t k) const { c->update_mul += k; }
  void attractor_madd(std::size_t k) const { c->attractor_madd += k; }
  void window_pairs(std::size_t k) const { c->window_pairs += k; }
  void abs_e(std::size_t k) const { c->abs_e += k; }
};

// --- per-tap update kernels -----------------------------------------------
//
// The kernels are written so that the documented reductions are bit-exact:
//   DwzaLms(rho=0)        == Lms       (the attractor contributes exact 0)
//   DwzaNlms(rho=0)       == Nlms
//   WzaLms(a=0, b=inf)    == ZaLms     (partial sign degenerates to sign)
//   DwzaLms(a=0, b=inf)   == DzaLms
// The scalar in front of the gradient is pre-multiplied (me = mu*e, or
// g*mu*e for the normalized family), so each tap costs one multiply plus at
// most one attraction add.  The window test always uses the pre-update w_i.

template <class T>
std::size_t kern_lms(std::vector<double>& w, const double* x, double me, T t) {
  const std::size_t L = w.size();
  for (std::size_t i = 0; i < L; ++i) w[i] += me * x[i];
  t.update_mul(L);
  return 0;
}

template <class T>
std::size_t kern_sign(std::vector<double>& w, const double* x, double me,
                      double rho_c, T t) {
  const std::size_t L = w.size();
  std::size_t acted = 0;
  for (std::size_t i = 0; i < L; ++i) {
    const double wi = w[i];
    double upd = me * x[i];
    if (wi != 0.0) {
      upd -= (wi > 0.0) ? rho_c : -rho_c;
      ++acted;
    }
    w[i] = wi + upd;
  }
  t.update_mul(L);
  t.attractor_madd(acted);
  return acted;
}

template <class T>
std::size_t kern_window(std::vector<double>& w, const double* x, double me,
                        double rho_c, double a, double b, T t) {
  const std::size_t L = w.size();
  std::size_t acted = 0;
  for (std::size_t i = 0; i < L; ++i) {
    const double wi = w[i];
    const double m = std::fabs(wi);
    double upd = me * x[i];
    if (m > a && m <= b) {
      upd -= (wi > 0.0) ? rho_c : -rho_c;
      ++acted;
    }
    w[i] = wi + upd;
  }
  t.update_mul(L);
  t.window_pairs(L);
  t.attractor_madd(acted);
  return acted;
}

template <class Tally>
StepOutput step_impl(FilterState& st, const AlgorithmParams& params,
                     double x_new, double d, Tally tally) {
  const std::size_t L = st.length();
  if (L == 0) throw std::invalid_argument("step: uninitialized state");
  if (st.poisoned) {
    throw divergence_error("step: state is poisoned by an earlier overflow");
  }
  if (!std::isfinite(x_new) || !std::isfinite(d)) {
    st.poisoned = true;
    throw divergence_error("step: non-finite input sample");
  }
  st.push(x_new);
  const double* x = st.hist.data() + st.pos;
  double y = 0.0;
  for (std::size_t i = 0; i < L; ++i) y += st.w[i] * x[i];
  tally.conv_mul(L);
  const double e = d - y;
  if (!std::isfinite(y) || !std::isfinite(e)) {
    st.poisoned = true;
    throw divergence_error("step: filter output overflowed");
  }

  StepOutput out;
  out.y = y;
  out.error = e;
  out.attracted_count = std::visit(
      [&](const auto& p) -> std::size_t {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Lms>) {
          return kern_lms(st.w, x, p.mu * e, tally);
        } else if constexpr (std::is_same_v<P, ZaLms>) {
          return kern_sign(st.w, x, p.mu * e, p.rho, tally);
        } else if constexpr (std::is_same_v<P, WzaLms>) {
          return kern_window(st.w, x, p.mu * e, p.rho, p.a, p.b, tally);
        } else if constexpr (std::is_same_v<P, DzaLms>) {
          tally.abs_e(1);
          return kern_sign(st.w, x, p.mu * e, p.rho * std::fabs(e), tally);
        } else if constexpr (std::is_same_v<P, DwzaLms>) {
          tally.abs_e(1);
          return kern_window(st.w, x, p.mu * e, p.rho * std::fabs(e), p.a, p.b,
                             tally);
        } else if constexpr (std::is_same_v<P, Nlms>) {
          const double g = 1.0 / (p.eps + st.xpow);
          return kern_lms(st.w, x, (p.mu * e) * g, tally);
        } else if constexpr (std::is_same_v<P, ZaNlms>) {
          const double g = 1.0 / (p.eps + st.xpow);
          return kern_sign(st.w, x, (p.mu * e) * g, p.rho * g, tally);
        } else {
          static_assert(std::is_same_v<P, DwzaNlms>);
          const double g = 1.0 / (p.eps + st.xpow);
          tally.abs_e(1);
          return kern_window(st.w, x, (p.mu * e) * g,
                             (p.rho * std::fabs(e)) * g, p.a, p.b, tally);
        }
      },
      params);
  ++st.n;
  return out;
}

}  // namespace detail

/// One adaptation step: shifts x_new into the window, emits y and e, applies
/// the selected update rule.  Non-finite inputs or outputs poison the state
/// and raise divergence_error.
inline StepOutput step(FilterState& st, const AlgorithmParams& params,
                       double x_new, double d) {
  return detail::step_impl(st, params, x_new, d, detail::NoTally{});
}

/// step plus an exact tally of per-tap operations (for the complexity
/// assertions; identical arithmetic to step).
inline StepOutput step_counted(FilterState& st, const AlgorithmParams& params,
                               double x_new, double d, StepCounts& counts) {
  return detail::step_impl(st, params, x_new, d, detail::CountTally{&counts});
}

inline constexpr std::uint64_t kStreamHashInit = 0xcbf29ce484222325ULL;

/// Order-sensitive 64-bit hash used to fingerprint the (x, d) stream a run
/// consumed; trials are paired iff these match across algorithms.
inline std::uint64_t stream_hash_absorb(std::uint64_t h, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  return (h ^ bits) * 0x100000001b3ULL;
}

/// Learning-curve fragment from driving `step` over a whole realization.
struct RunTrace {
  std::vector<double> msd;        // ||w - h||^2 every record_every steps
  std::vector<double> err2;       // e^2 at the same instants
  std::vector<double> attracted;  // attracted_count / L at the same instants
  double final_msd = 0.0;
  std::uint64_t steps = 0;
  std::uint64_t consumed_hash = kStreamHashInit;
};

RunTrace run(FilterState& st, const AlgorithmParams& params,
             std::span<const double> x, std::span<const double> d,
             std::span<const double> h_taps, std::size_t record_every = 1,
             std::uint64_t hash_seed = kStreamHashInit);

RunTrace run(FilterState& st, const AlgorithmParams& params,
             std::span<const double> x, std::span<const double> d,
             const SystemModel& h, std::size_t record_every = 1,
             std::uint64_t hash_seed = kStreamHashInit);

}  // namespace zalms

#endif  // ZALMS_FILTERS_HPP
