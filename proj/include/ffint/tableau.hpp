#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ffint {

// Coefficients of one frozen flow method: s stages, K exponentials per stage
// and per final update, L noise channels. The k-th exponential is applied
// first for k=1. Stage/final exponentials with fewer than K entries are
// zero-padded.
struct Tableau {
  int s = 0, K = 0, L = 0;
  // stage drift weights: stage i, exponential k, referencing stage j
  std::vector<double> Z0;    // [s][s][K], index (i*s + j)*K + k
  // final drift weights: referencing stage i, exponential k
  std::vector<double> z0;    // [s][K], index i*K + k
  // stage noise weights: stage i, exponential k, channel l
  std::vector<double> Zhat;  // [s][K][L], index (i*K + k)*L + l
  // final noise weights: exponential k, channel l
  std::vector<double> zhat;  // [K][L], index k*L + l

  static Tableau zeros(int s, int K, int L);

  double& zZ0(int i, int j, int k) { return Z0[(i * s + j) * std::size_t(K) + k]; }
  double Z0_at(int i, int j, int k) const { return Z0[(i * s + j) * std::size_t(K) + k]; }
  double& z0_ref(int i, int k) { return z0[i * std::size_t(K) + k]; }
  double z0_at(int i, int k) const { return z0[i * std::size_t(K) + k]; }
  double& Zhat_ref(int i, int k, int l) { return Zhat[(i * K + k) * std::size_t(L) + l]; }
  double Zhat_at(int i, int k, int l) const { return Zhat[(i * K + k) * std::size_t(L) + l]; }
  double& zhat_ref(int k, int l) { return zhat[k * std::size_t(L) + l]; }
  double zhat_at(int k, int l) const { return zhat[k * std::size_t(L) + l]; }

  // Explicit method: stage i may reference only stages j < i.
  bool is_explicit() const;
  // True when exponential k of stage i (or of the final update) has any
  // nonzero coefficient; identity exponentials are skipped by the stepper.
  bool stage_exp_used(int i, int k) const;
  bool final_exp_used(int k) const;
};

// Frozen flow Euler step: one stage, one exponential, z0 = 1, zhat = sqrt(2).
Tableau euler_ff_tableau();

// Explicit two-stage method of weak order two (three exponentials per step).
Tableau sff2_tableau();

// Drift-free two-exponential scheme; its noise rows coincide with the final
// update of sff2, so on problems with F = 0 the two methods take identical
// steps.
Tableau brownian2_lie_tableau();

// Flat text format: "s K L" header, then labeled blocks z0, zhat, Z0, Zhat
// (row-major, one row per line). Unlisted blocks stay zero.
Tableau read_tableau(std::istream& in);
Tableau read_tableau_file(const std::string& path);
void write_tableau(std::ostream& out, const Tableau& t);

}  // namespace ffint
