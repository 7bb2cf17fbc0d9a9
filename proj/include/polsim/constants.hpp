#pragma once

namespace polsim {

// Physical constants. Only gamma_n enters observables; hbar appears in energy
// bookkeeping documentation (E = hbar*omega per exchanged photon).
struct PhysicalConstants {
  // Gyromagnetic-ratio magnitude, rad s^-1 T^-1 (CODATA). Positive-magnitude
  // convention: the precession sense is fixed by H = -(hbar*gamma/2) sigma.B,
  // matching the classical dS/dt = gamma S x B with gamma > 0.
  double gamma_n = 1.83247171e8;
  double hbar = 1.054571817e-34;  // J s
};

inline constexpr double kPlanckH = 6.62607015e-34;        // J s
inline constexpr double kNeutronMass = 1.67492749804e-27;  // kg

// De Broglie velocity for a given wavelength (m). 1.99 Angstrom -> ~1990 m/s.
inline double velocity_from_wavelength(double wavelength_m) {
  return kPlanckH / (kNeutronMass * wavelength_m);
}

inline constexpr double kDefaultWavelength = 1.99e-10;  // m
inline constexpr double kDefaultVelocity = 1990.0;      // m/s
inline constexpr double kDefaultPolarization = 0.98;
inline constexpr double kDefaultGuideField = 1.079e-3;  // T (10.79 G)

}  // namespace polsim
