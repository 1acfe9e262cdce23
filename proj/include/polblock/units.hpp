#pragma once

// Internal unit system: energy in meV, time in ps, length in nm, charge in
// units of the elementary charge. hbar is kept explicit so that energies
// quoted in meV can be entered verbatim.

namespace polblock::units {

// Exponents of (meV, ps, nm, e). Used for compile-time dimensional checks.
struct Dimension {
    int energy{0};
    int time{0};
    int length{0};
    int charge{0};

    friend constexpr Dimension operator*(Dimension a, Dimension b) noexcept
    {
        return {a.energy + b.energy, a.time + b.time, a.length + b.length, a.charge + b.charge};
    }
    friend constexpr Dimension operator/(Dimension a, Dimension b) noexcept
    {
        return {a.energy - b.energy, a.time - b.time, a.length - b.length, a.charge - b.charge};
    }
    friend constexpr bool operator==(Dimension, Dimension) = default;

    constexpr Dimension pow(int n) const noexcept
    {
        return {energy * n, time * n, length * n, charge * n};
    }
};

namespace dim {
inline constexpr Dimension none{};
inline constexpr Dimension energy{1, 0, 0, 0};
inline constexpr Dimension time{0, 1, 0, 0};
inline constexpr Dimension length{0, 0, 1, 0};
inline constexpr Dimension charge{0, 0, 0, 1};
inline constexpr Dimension angular_frequency = none / time;
inline constexpr Dimension action = energy * time;
inline constexpr Dimension mass = energy * time.pow(2) / length.pow(2);
inline constexpr Dimension momentum = mass * length / time;
inline constexpr Dimension permittivity = charge.pow(2) / (energy * length);
} // namespace dim

// CODATA 2018 SI values used to derive the internal constants.
namespace si {
inline constexpr double elementary_charge_C = 1.602176634e-19;
inline constexpr double electron_mass_kg = 9.1093837015e-31;
inline constexpr double vacuum_permittivity_F_per_m = 8.8541878128e-12;
inline constexpr double joule_per_mev = 1.602176634e-22;
} // namespace si

struct Quantity {
    double value;
    Dimension dimension;
};

struct UnitSystem {
    const char* energy_unit = "meV";
    const char* time_unit = "ps";
    const char* length_unit = "nm";
    const char* charge_unit = "e";

    Quantity hbar{0.6582119569, dim::action};
    Quantity elementary_charge{1.0, dim::charge};
    // kg -> meV ps^2 / nm^2
    Quantity electron_mass{si::electron_mass_kg / si::joule_per_mev * 1e24 / 1e18, dim::mass};
    // C^2 / (J m) -> e^2 / (meV nm)
    Quantity vacuum_permittivity{si::vacuum_permittivity_F_per_m
                                     / (si::elementary_charge_C * si::elementary_charge_C)
                                     * si::joule_per_mev * 1e-9,
                                 dim::permittivity};
    double boltzmann_mev_per_K = 0.08617333262;
};

inline constexpr UnitSystem kUnits{};

inline constexpr double hbar_mev_ps = kUnits.hbar.value;
inline constexpr double electron_mass = kUnits.electron_mass.value;
inline constexpr double vacuum_permittivity = kUnits.vacuum_permittivity.value;
inline constexpr double boltzmann_mev_per_K = kUnits.boltzmann_mev_per_K;
inline constexpr double pi = 3.141592653589793238462643383279502884;

// hbar^2 / (2 m0) in meV nm^2 (about 38.1).
inline constexpr double hbar2_over_2m0_mev_nm2 = hbar_mev_ps * hbar_mev_ps / (2.0 * electron_mass);

constexpr double angular_frequency_per_ps(double energy_mev) noexcept { return energy_mev / hbar_mev_ps; }
constexpr double energy_mev(double angular_frequency_per_ps) noexcept { return angular_frequency_per_ps * hbar_mev_ps; }

} // namespace polblock::units
