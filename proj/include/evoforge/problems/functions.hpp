#pragma once

// The 32 basic objective functions. Each is evaluated on the transformed
// point z = M^T(x - o). Functions whose classical optimum is away from the
// origin carry an internal offset so that the global minimum sits at z = 0
// (value computable by evaluation); Linear_Slope is the exception and keeps
// its boundary optimum.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "evoforge/rng.hpp"

namespace evoforge {

enum class BasicFn : int {
  Sphere = 1, SchwefelF12, Ellipsoidal, EllipsoidalHigh, BentCigar, Discus,
  DifferentPowers, Rosenbrock, Ackley, Weierstrass, Griewank, Rastrigin,
  BucheRastrigin, ModifiedSchwefel, Katsuura, GriewankRosenbrock, EscafferF6,
  Happycat, Hgbat, LunacekBiRastrigin, Zakharov, Levy, ScafferF7,
  StepRastrigin, LinearSlope, AttractiveSector, StepEllipsoidal, SharpRidge,
  RastriginF15, Schwefel, Gallagher101, Gallagher21,
};
inline constexpr int kBasicFnCount = 32;

enum class Modality { Unimodal, Multimodal };
enum class GlobalStructure { Adequate, Weak };
enum class Conditioning { Low, High };

struct BasicFnInfo {
  const char* name;
  Modality modality;
  GlobalStructure structure;
  Conditioning conditioning;
  bool min_at_origin;
};

inline const BasicFnInfo& basic_fn_info(BasicFn fn) {
  static const BasicFnInfo table[kBasicFnCount] = {
      {"Sphere", Modality::Unimodal, GlobalStructure::Adequate, Conditioning::Low, true},
      {"Schwefel_F12", Modality::Unimodal, GlobalStructure::Adequate, Conditioning::Low, true},
      {"Ellipsoidal", Modality::Unimodal, GlobalStructure::Adequate, Conditioning::Low, true},
      {"Ellipsoidal_High", Modality::Unimodal, GlobalStructure::Adequate, Conditioning::High, true},
      {"Bent_Cigar", Modality::Unimodal, GlobalStructure::Adequate, Conditioning::High, true},
      {"Discus", Modality::Unimodal, GlobalStructure::Adequate, Conditioning::High, true},
      {"Different_Powers", Modality::Unimodal, GlobalStructure::Adequate, Conditioning::High, true},
      {"Rosenbrock", Modality::Unimodal, GlobalStructure::Adequate, Conditioning::Low, true},
      {"Ackley", Modality::Multimodal, GlobalStructure::Adequate, Conditioning::High, true},
      {"Weierstrass", Modality::Multimodal, GlobalStructure::Weak, Conditioning::High, true},
      {"Griewank", Modality::Multimodal, GlobalStructure::Weak, Conditioning::Low, true},
      {"Rastrigin", Modality::Multimodal, GlobalStructure::Weak, Conditioning::High, true},
      {"Buche_Rastrigin", Modality::Unimodal, GlobalStructure::Adequate, Conditioning::High, true},
      {"Modified_Schwefel", Modality::Multimodal, GlobalStructure::Weak, Conditioning::High, true},
      {"Katsuura", Modality::Multimodal, GlobalStructure::Weak, Conditioning::High, true},
      {"Griewank_Rosenbrock", Modality::Unimodal, GlobalStructure::Adequate, Conditioning::Low, true},
      {"Escaffer_F6", Modality::Multimodal, GlobalStructure::Adequate, Conditioning::High, true},
      {"Happycat", Modality::Multimodal, GlobalStructure::Weak, Conditioning::Low, true},
      {"Hgbat", Modality::Unimodal, GlobalStructure::Adequate, Conditioning::Low, true},
      {"Lunacek_bi_Rastrigin", Modality::Multimodal, GlobalStructure::Weak, Conditioning::High, true},
      {"Zakharov", Modality::Unimodal, GlobalStructure::Adequate, Conditioning::Low, true},
      {"Levy", Modality::Multimodal, GlobalStructure::Weak, Conditioning::High, true},
      {"Scaffer_F7", Modality::Multimodal, GlobalStructure::Weak, Conditioning::Low, true},
      {"Step_Rastrigin", Modality::Multimodal, GlobalStructure::Weak, Conditioning::Low, true},
      {"Linear_Slope", Modality::Unimodal, GlobalStructure::Adequate, Conditioning::Low, false},
      {"Attractive_Sector", Modality::Unimodal, GlobalStructure::Adequate, Conditioning::High, true},
      {"Step_Ellipsoidal", Modality::Multimodal, GlobalStructure::Weak, Conditioning::Low, true},
      {"Sharp_Ridge", Modality::Unimodal, GlobalStructure::Adequate, Conditioning::High, true},
      {"Rastrigin_F15", Modality::Unimodal, GlobalStructure::Weak, Conditioning::Low, true},
      {"Schwefel", Modality::Multimodal, GlobalStructure::Weak, Conditioning::Low, true},
      {"Gallagher_101me", Modality::Multimodal, GlobalStructure::Weak, Conditioning::Low, true},
      {"Gallagher_21hi", Modality::Multimodal, GlobalStructure::Weak, Conditioning::Low, true},
  };
  int i = static_cast<int>(fn) - 1;
  if (i < 0 || i >= kBasicFnCount) throw std::invalid_argument("bad BasicFn");
  return table[i];
}

inline BasicFn basic_fn_from_name(const std::string& name) {
  for (int i = 1; i <= kBasicFnCount; ++i)
    if (name == basic_fn_info(static_cast<BasicFn>(i)).name)
      return static_cast<BasicFn>(i);
  throw std::invalid_argument("unknown basic function: " + name);
}

// Per-instance randomized internals (Gallagher peaks, slope signs).
struct BasicFnParams {
  std::vector<double> slope;          // Linear_Slope coefficients s_i
  std::vector<std::vector<double>> peaks;  // Gallagher peak locations
  std::vector<double> peak_w;              // peak heights
  std::vector<double> peak_q;              // peak precisions
};

inline BasicFnParams make_fn_params(BasicFn fn, int dim, double lb, double ub,
                                    Rng rng) {
  BasicFnParams p;
  if (fn == BasicFn::LinearSlope) {
    p.slope.resize(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i) {
      const double mag =
          dim == 1 ? 1.0 : std::pow(10.0, static_cast<double>(i) / (dim - 1));
      p.slope[static_cast<size_t>(i)] = (rng.uniform() < 0.5 ? -1.0 : 1.0) * mag;
    }
  } else if (fn == BasicFn::Gallagher101 || fn == BasicFn::Gallagher21) {
    const int n_peaks = fn == BasicFn::Gallagher101 ? 101 : 21;
    const double q_max = fn == BasicFn::Gallagher101 ? std::log(30.0) : std::log(1000.0);
    p.peaks.resize(static_cast<size_t>(n_peaks));
    p.peak_w.resize(static_cast<size_t>(n_peaks));
    p.peak_q.resize(static_cast<size_t>(n_peaks));
    for (int k = 0; k < n_peaks; ++k) {
      auto& y = p.peaks[static_cast<size_t>(k)];
      y.assign(static_cast<size_t>(dim), 0.0);
      if (k == 0) {
        p.peak_w[0] = 10.0;  // global peak pinned at the origin
        p.peak_q[0] = 1.0;
      } else {
        for (int j = 0; j < dim; ++j)
          y[static_cast<size_t>(j)] = rng.uniform(0.8 * lb, 0.8 * ub);
        p.peak_w[static_cast<size_t>(k)] =
            1.1 + 8.0 * (k - 1) / std::max(1, n_peaks - 2);
        p.peak_q[static_cast<size_t>(k)] = std::exp(rng.uniform(0.0, q_max));
      }
    }
  }
  return p;
}

namespace fndetail {

inline double cond_weight(int i, int dim, double expo) {
  return dim == 1 ? 1.0 : std::pow(10.0, expo * i / (dim - 1));
}

// CEC-style wrapped Schwefel kernel with out-of-range penalty.
inline double schwefel_g(double w, int dim) {
  const double aw = std::fabs(w);
  if (aw <= 500.0) return w * std::sin(std::sqrt(aw));
  if (w > 500.0) {
    const double v = 500.0 - std::fmod(w, 500.0);
    return v * std::sin(std::sqrt(std::fabs(v))) -
           (w - 500.0) * (w - 500.0) / (10000.0 * dim);
  }
  const double v = std::fmod(aw, 500.0) - 500.0;
  return v * std::sin(std::sqrt(std::fabs(v))) -
         (w + 500.0) * (w + 500.0) / (10000.0 * dim);
}

}  // namespace fndetail

inline double eval_basic(BasicFn fn, std::span<const double> z,
                         const BasicFnParams* params = nullptr) {
  const int d = static_cast<int>(z.size());
  const double pi = std::numbers::pi;
  using fndetail::cond_weight;
  switch (fn) {
    case BasicFn::Sphere: {
      double s = 0;
      for (double v : z) s += v * v;
      return s;
    }
    case BasicFn::SchwefelF12: {
      double s = 0, run = 0;
      for (double v : z) {
        run += v;
        s += run * run;
      }
      return s;
    }
    case BasicFn::Ellipsoidal: {
      double s = 0;
      for (int i = 0; i < d; ++i) s += (i + 1.0) * z[i] * z[i];
      return s;
    }
    case BasicFn::EllipsoidalHigh: {
      double s = 0;
      for (int i = 0; i < d; ++i) s += cond_weight(i, d, 6.0) * z[i] * z[i];
      return s;
    }
    case BasicFn::BentCigar: {
      double s = z[0] * z[0];
      for (int i = 1; i < d; ++i) s += 1e6 * z[i] * z[i];
      return s;
    }
    case BasicFn::Discus: {
      double s = 1e6 * z[0] * z[0];
      for (int i = 1; i < d; ++i) s += z[i] * z[i];
      return s;
    }
    case BasicFn::DifferentPowers: {
      double s = 0;
      for (int i = 0; i < d; ++i)
        s += std::pow(std::fabs(z[i]), 2.0 + (d == 1 ? 0.0 : 4.0 * i / (d - 1)));
      return s;
    }
    case BasicFn::Rosenbrock: {
      double s = 0;
      for (int i = 0; i + 1 < d; ++i) {
        const double a = z[i] + 1.0, b = z[i + 1] + 1.0;
        s += 100.0 * (a * a - b) * (a * a - b) + (a - 1.0) * (a - 1.0);
      }
      return s;
    }
    case BasicFn::Ackley: {
      double sq = 0, cs = 0;
      for (double v : z) {
        sq += v * v;
        cs += std::cos(2.0 * pi * v);
      }
      return -20.0 * std::exp(-0.2 * std::sqrt(sq / d)) - std::exp(cs / d) +
             20.0 + std::numbers::e;
    }
    case BasicFn::Weierstrass: {
      constexpr double a = 0.5, b = 3.0;
      constexpr int kmax = 20;
      double s = 0, base = 0;
      for (int k = 0; k <= kmax; ++k)
        base += std::pow(a, k) * std::cos(pi * std::pow(b, k));
      for (double v : z) {
        double t = 0;
        for (int k = 0; k <= kmax; ++k)
          t += std::pow(a, k) * std::cos(2.0 * pi * std::pow(b, k) * (v + 0.5));
        s += t;
      }
      return s - d * base;
    }
    case BasicFn::Griewank: {
      double s = 0, p = 1;
      for (int i = 0; i < d; ++i) {
        s += z[i] * z[i];
        p *= std::cos(z[i] / std::sqrt(i + 1.0));
      }
      return s / 4000.0 - p + 1.0;
    }
    case BasicFn::Rastrigin: {
      double s = 0;
      for (double v : z) s += v * v - 10.0 * std::cos(2.0 * pi * v) + 10.0;
      return s;
    }
    case BasicFn::BucheRastrigin: {
      double sq = 0, cs = 0;
      for (int i = 0; i < d; ++i) {
        double w = cond_weight(i, d, 0.5);
        if (z[i] > 0.0 && i % 2 == 0) w *= 10.0;
        const double t = w * z[i];
        sq += t * t;
        cs += std::cos(2.0 * pi * t);
      }
      return 10.0 * (d - cs) + sq;
    }
    case BasicFn::ModifiedSchwefel: {
      double s = 0;
      for (int i = 0; i < d; ++i) {
        const double w = cond_weight(i, d, 0.5) * z[i] + 420.9687462275036;
        s += fndetail::schwefel_g(w, d);
      }
      return 418.9828872724339 * d - s;
    }
    case BasicFn::Katsuura: {
      double prod = 1.0;
      const double expo = 10.0 / std::pow(d, 1.2);
      for (int i = 0; i < d; ++i) {
        double t = 0;
        double p2 = 2.0;
        for (int j = 1; j <= 32; ++j) {
          const double w = p2 * z[i];
          t += std::fabs(w - std::nearbyint(w)) / p2;
          p2 *= 2.0;
        }
        prod *= std::pow(1.0 + (i + 1.0) * t, expo);
      }
      const double c = 10.0 / (d * d);
      return c * prod - c;
    }
    case BasicFn::GriewankRosenbrock: {
      double s = 0;
      for (int i = 0; i + 1 < d; ++i) {
        const double a = z[i] + 1.0, b = z[i + 1] + 1.0;
        const double r = 100.0 * (a * a - b) * (a * a - b) + (a - 1.0) * (a - 1.0);
        s += r / 4000.0 - std::cos(r) + 1.0;
      }
      return s;
    }
    case BasicFn::EscafferF6: {
      auto g = [&](double x, double y) {
        const double ss = x * x + y * y;
        const double num = std::sin(std::sqrt(ss));
        const double den = 1.0 + 0.001 * ss;
        return 0.5 + (num * num - 0.5) / (den * den);
      };
      double s = 0;
      for (int i = 0; i < d; ++i) s += g(z[i], z[(i + 1) % d]);
      return s;
    }
    case BasicFn::Happycat: {
      double sq = 0, sm = 0;
      for (double v : z) {
        const double w = v - 1.0;
        sq += w * w;
        sm += w;
      }
      return std::pow(std::fabs(sq - d), 0.25) + (0.5 * sq + sm) / d + 0.5;
    }
    case BasicFn::Hgbat: {
      double sq = 0, sm = 0;
      for (double v : z) {
        const double w = v - 1.0;
        sq += w * w;
        sm += w;
      }
      return std::sqrt(std::fabs(sq * sq - sm * sm)) + (0.5 * sq + sm) / d + 0.5;
    }
    case BasicFn::LunacekBiRastrigin: {
      const double mu0 = 2.5, dpar = 1.0;
      const double s = 1.0 - 1.0 / (2.0 * std::sqrt(d + 20.0) - 8.2);
      const double mu1 = -std::sqrt((mu0 * mu0 - dpar) / s);
      double s0 = 0, s1 = 0, cs = 0;
      for (double v : z) {
        const double w = v + mu0;
        s0 += (w - mu0) * (w - mu0);
        s1 += (w - mu1) * (w - mu1);
        cs += std::cos(2.0 * pi * (w - mu0));
      }
      return std::min(s0, dpar * d + s * s1) + 10.0 * (d - cs);
    }
    case BasicFn::Zakharov: {
      double sq = 0, lin = 0;
      for (int i = 0; i < d; ++i) {
        sq += z[i] * z[i];
        lin += 0.5 * (i + 1.0) * z[i];
      }
      return sq + lin * lin + lin * lin * lin * lin;
    }
    case BasicFn::Levy: {
      auto w = [&](int i) { return 1.0 + z[i] / 4.0; };
      double s = std::sin(pi * w(0)) * std::sin(pi * w(0));
      for (int i = 0; i + 1 < d; ++i) {
        const double wi = w(i), sw = std::sin(pi * wi + 1.0);
        s += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * sw * sw);
      }
      const double wd = w(d - 1), sd = std::sin(2.0 * pi * wd);
      return s + (wd - 1.0) * (wd - 1.0) * (1.0 + sd * sd);
    }
    case BasicFn::ScafferF7: {
      if (d == 1) return 0.0;
      double s = 0;
      for (int i = 0; i + 1 < d; ++i) {
        const double si = std::sqrt(z[i] * z[i] + z[i + 1] * z[i + 1]);
        const double sn = std::sin(50.0 * std::pow(si, 0.2));
        s += std::sqrt(si) * (1.0 + sn * sn);
      }
      s /= (d - 1);
      return s * s;
    }
    case BasicFn::StepRastrigin: {
      double s = 0;
      for (double v : z) {
        const double w = std::fabs(v) <= 0.5 ? v : std::nearbyint(2.0 * v) / 2.0;
        s += w * w - 10.0 * std::cos(2.0 * pi * w) + 10.0;
      }
      return s;
    }
    case BasicFn::LinearSlope: {
      if (!params || params->slope.size() != z.size())
        throw std::invalid_argument("Linear_Slope needs instance slope params");
      double s = 0;
      for (int i = 0; i < d; ++i)
        s += 5.0 * std::fabs(params->slope[static_cast<size_t>(i)]) -
             params->slope[static_cast<size_t>(i)] * z[i];
      return s;
    }
    case BasicFn::AttractiveSector: {
      double s = 0;
      for (double v : z) {
        const double w = v > 0.0 ? 100.0 * v : v;
        s += w * w;
      }
      return s;
    }
    case BasicFn::StepEllipsoidal: {
      double s = 0;
      for (int i = 0; i < d; ++i) {
        const double w = std::floor(z[i] + 0.5);
        s += cond_weight(i, d, 2.0) * w * w;
      }
      return 0.1 * std::max(std::fabs(z[0]) / 1e4, s);
    }
    case BasicFn::SharpRidge: {
      double rest = 0;
      for (int i = 1; i < d; ++i) rest += z[i] * z[i];
      return z[0] * z[0] + 100.0 * std::sqrt(rest);
    }
    case BasicFn::RastriginF15: {
      double s = 0;
      for (int i = 0; i < d; ++i) {
        const double t = cond_weight(i, d, 0.5) * z[i];
        s += t * t - 10.0 * std::cos(2.0 * pi * t) + 10.0;
      }
      return s;
    }
    case BasicFn::Schwefel: {
      double s = 0;
      for (double v : z)
        s += fndetail::schwefel_g(v + 420.9687462275036, d);
      return 418.9828872724339 * d - s;
    }
    case BasicFn::Gallagher101:
    case BasicFn::Gallagher21: {
      if (!params || params->peaks.empty())
        throw std::invalid_argument("Gallagher needs instance peak params");
      double best = 0;
      for (size_t k = 0; k < params->peaks.size(); ++k) {
        double sq = 0;
        for (int j = 0; j < d; ++j) {
          const double t = z[j] - params->peaks[k][static_cast<size_t>(j)];
          sq += t * t;
        }
        const double v = params->peak_w[k] *
                         std::exp(-params->peak_q[k] / (2.0 * d) * sq);
        if (v > best) best = v;
      }
      const double r = 10.0 - best;
      return r * r;
    }
  }
  throw std::invalid_argument("bad BasicFn");
}

}  // namespace evoforge
