#pragma once
// Resonances of mu (mu Psi')' - (V - sigma^2) Psi = 0 on (r-, r+): Frobenius
// starts at both horizons, a Wronskian in sigma, argument-principle counting.
#include <complex>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "knds/perturbation.hpp"

namespace knds {

enum class HorizonSide { EventHorizon, CosmologicalHorizon };

struct RadialProblem {
  MasterEquation equation;
  cplx sigma;
  int frobenius_order = 0;    // 0: adaptive; otherwise a fixed order >= 4
  double match_radius = 0.0;  // 0: midpoint in the logarithmic variable
};

struct FrobeniusStart {
  double r;          // start radius r+- -+ delta
  double delta;
  cplx psi, dpsi;    // Psi and dPsi/dr there
  cplx exponent;     // -i sigma / (2 kappa)
  int order;
  double truncation; // |S_N - S_{N+4}| relative
};

// regular (resonant) branch x^s (1 + a1 x + ...), s = -i sigma/(2 kappa)
FrobeniusStart frobenius_solution(const RadialProblem& prob, HorizonSide side);

struct WronskianResult {
  cplx W;         // Psi_- Pi_+ - Pi_- Psi_+ with Pi = mu Psi'
  double scale;   // |Psi_-||Pi_+| + |Pi_-||Psi_+| at the match point
};
WronskianResult wronskian_detail(const RadialProblem& prob);
cplx wronskian(const RadialProblem& prob);

// Integrate a Frobenius start to radius r_end; returns (Psi, mu Psi').
std::pair<cplx, cplx> integrate_to(const MasterEquation& eq, cplx sigma, const FrobeniusStart& s, double r_end);

struct Window {
  double re_lo, re_hi, im_lo, im_hi;
};

struct ZeroInfo {
  cplx sigma;
  double residual;  // |W| / scale at the refined point
};

struct ResonanceReport {
  Window window;
  int winding = 0;
  std::vector<ZeroInfo> zeros;
  int samples_on_contour = 0;
  double min_rel_abs_w = 0.0;  // min |W|/scale seen on the contour
  nlohmann::ordered_json to_json() const;
};

struct ContourOptions {
  int max_depth = 10;
  int jobs = 1;
  bool use_symmetry = true;  // W(-conj s) = conj W(s) for real potentials
  bool refine_zeros = true;
};

// winding number of sigma -> W(sigma) along the boundary of the window
ResonanceReport count_resonances(const MasterEquation& eq, const Window& w, int contour_points,
                                 const ContourOptions& opt = {});

struct ScanEntry {
  std::string sector;
  int l;
  std::string branch;
  ResonanceReport report;
};
struct ScanResult {
  std::vector<ScanEntry> entries;
  bool stable() const;
  nlohmann::ordered_json to_json(const BlackHoleParams& p) const;
};

// every branch of each listed sector for l = l_min(sector)..l_max
ScanResult mode_stability_scan(const BlackHoleParams& p, const std::vector<SectorKind>& sectors, int l_max,
                               const Window& w, int contour_points = 128, const ContourOptions& opt = {});
// the window [-3 k+, 3 k+] x [1e-3 k+, 3 k+]
Window default_scan_window(const BlackHoleParams& p);

// ---- constraint damping ----

struct DampingOperator {
  // coefficients of  mu v'' + B v' + C v = 0  for the radial l = 0 operator
  // with the gamma-modification, at the given sigma
  BlackHoleParams params;
  StarGauge gauge;
  double gamma;
  cplx sigma;
  cplx B(double r) const;
  cplx C(double r) const;
};

struct DampingResult {
  cplx sigma;
  int iterations;
  double residual;
};
// zero of the damping Wronskian continued from sigma(0) = 0
DampingResult constraint_damping_resonance_detail(const BlackHoleParams& p, double gamma3);
cplx constraint_damping_resonance(const BlackHoleParams& p, double gamma3);
// D(sigma) for the damping problem (exposed for tests)
cplx damping_wronskian(const BlackHoleParams& p, double gamma3, cplx sigma);

nlohmann::ordered_json params_json(const BlackHoleParams& p);

void parallel_for(int n, int jobs, const std::function<void(int)>& body);

}  // namespace knds
