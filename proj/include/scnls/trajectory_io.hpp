#pragma once

// Per-snapshot diagnostics of single runs, streamed as CSV while the solver
// advances (so a guard abort leaves every good snapshot on disk).

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "scnls/nls.hpp"
#include "scnls/report.hpp"
#include "scnls/wkb.hpp"

namespace scnls {

namespace detail {

inline std::string norm_column(const std::string& prefix, double s) {
  return prefix + "_hdot_" + fmt17(s);
}

}  // namespace detail

/// Columns: step,t,mass,energy,u_hdot_<s>...
class NlsTrajectoryWriter {
 public:
  NlsTrajectoryWriter(std::ostream& os, std::vector<double> norms) : os_(os), norms_(std::move(norms)) {
    os_ << "step,t,mass,energy";
    for (double s : norms_) os_ << ',' << detail::norm_column("u", s);
    os_ << '\n';
  }

  void operator()(const NlsState& st) {
    os_ << index_++ << ',' << fmt17(st.t) << ',' << fmt17(mass(st.u)) << ','
        << fmt17(semiclassical_energy(st));
    for (double s : norms_) os_ << ',' << fmt17(norm(st.u, SobolevIndex::hdot(s)));
    os_ << '\n';
    os_.flush();
  }

  std::size_t rows() const { return index_; }

 private:
  std::ostream& os_;
  std::vector<double> norms_;
  std::size_t index_ = 0;
};

/// Columns: step,t,grad_phi_max,phi_linf,mass_a,a_hdot_<s>...,phi1_linf,a1_hdot_<s>...
/// Corrector columns are empty for eps > 0 runs.
class WkbTrajectoryWriter {
 public:
  WkbTrajectoryWriter(std::ostream& os, std::vector<double> norms) : os_(os), norms_(std::move(norms)) {
    os_ << "step,t,grad_phi_max,phi_linf,mass_a";
    for (double s : norms_) os_ << ',' << detail::norm_column("a", s);
    os_ << ",phi1_linf";
    for (double s : norms_) os_ << ',' << detail::norm_column("a1", s);
    os_ << '\n';
  }

  void operator()(const GrenierState& st, double grad_phi_max) { row(st, grad_phi_max, nullptr); }
  void operator()(const LimitSnapshot& snap) { row(snap.background, snap.grad_phi_max, &snap.corrector); }

  std::size_t rows() const { return index_; }

 private:
  void row(const GrenierState& st, double grad_phi_max, const CorrectorState* corr) {
    os_ << index_++ << ',' << fmt17(st.t) << ',' << fmt17(grad_phi_max) << ','
        << fmt17(linf_norm(st.phi)) << ',' << fmt17(mass(st.a));
    for (double s : norms_) os_ << ',' << fmt17(norm(st.a, SobolevIndex::hdot(s)));
    os_ << ',' << (corr ? fmt17(linf_norm(corr->phi1)) : std::string());
    for (double s : norms_)
      os_ << ',' << (corr ? fmt17(norm(corr->a1, SobolevIndex::hdot(s))) : std::string());
    os_ << '\n';
    os_.flush();
  }

  std::ostream& os_;
  std::vector<double> norms_;
  std::size_t index_ = 0;
};

}  // namespace scnls
