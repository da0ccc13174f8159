#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "solwave/errors.hpp"
#include "solwave/solver.hpp"
#include "solwave/spectral.hpp"

namespace solwave {

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

inline void write_field_csv(const std::string& path, const Field& f) {
  auto out = detail::open_out(path);
  out << "x,value\n";
  const auto& v = f.values();
  for (int j = 0; j < f.grid().size(); ++j) {
    out << detail::fmt(f.grid().node(j)) << ',' << detail::fmt(v[j]) << '\n';
  }
}

inline void write_coeffs_csv(const std::string& path, const Field& f) {
  auto out = detail::open_out(path);
  out << "k,xi,coeff\n";
  const auto c = f.cosine_coeffs();
  for (int k = 0; k < f.grid().modes(); ++k) {
    out << k << ',' << detail::fmt(f.grid().freq(k)) << ','
        << detail::fmt(c[k]) << '\n';
  }
}

/// Physical profile with the reconstructed elevation (when available).
inline void write_profile_csv(const std::string& path, const Field& v,
                              const Field* eta) {
  auto out = detail::open_out(path);
  out << (eta ? "x,v,eta\n" : "x,v\n");
  const auto& vv = v.values();
  for (int j = 0; j < v.grid().size(); ++j) {
    out << detail::fmt(v.grid().node(j)) << ',' << detail::fmt(vv[j]);
    if (eta) out << ',' << detail::fmt(eta->values()[j]);
    out << '\n';
  }
}

struct SweepRow {
  double eps, omega;
  int iterations;
  double phi_norm, deviation, r1, r2;
};

inline void write_sweep_csv(const std::string& path,
                            const std::vector<SweepRow>& rows) {
  auto out = detail::open_out(path);
  out << "eps,omega,iterations,phi_norm,deviation,r1,r2\n";
  for (const auto& r : rows) {
    out << detail::fmt(r.eps) << ',' << detail::fmt(r.omega) << ','
        << r.iterations << ',' << detail::fmt(r.phi_norm) << ','
        << detail::fmt(r.deviation) << ',' << detail::fmt(r.r1) << ','
        << detail::fmt(r.r2) << '\n';
  }
}

}  // namespace solwave
