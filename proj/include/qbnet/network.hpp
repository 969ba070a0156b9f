#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace qbnet {

using complex = std::complex<double>;

enum class ModeRole { charger, battery, intermediate };

/// One bosonic mode. `decay_rate` is the energy decay rate; the amplitude
/// damps at half of it. All frequencies are in units of the mode frequency.
struct ModeSpec {
    std::string id;
    ModeRole role = ModeRole::battery;
    double decay_rate = 0.0;
    double detuning = 0.0;
};

/// Beam-splitter coupling g e^{i phase} (source)(target)^dagger + h.c.
struct CouplingSpec {
    std::string source;
    std::string target;
    double strength = 0.0;
    double phase = 0.0;
};

/// Coherent drive xi (mode) + h.c. in the frame rotating with the drive.
struct DriveSpec {
    std::string mode;
    complex amplitude{0.0, 0.0};
};

struct NetworkSpec {
    std::vector<ModeSpec> modes;
    std::vector<CouplingSpec> couplings;
    std::vector<DriveSpec> drives;

    [[nodiscard]] const ModeSpec* find_mode(std::string_view id) const;
};

enum class Family { cascaded, parallel };

/// r1: direct couplings only. r2: intermediates added, direct phases 0.
/// nr: intermediates added, direct phases -pi/2. custom: intermediates added,
/// direct phases taken from `thetas`.
enum class Variant { r1, r2, nr, custom };

/// Parameter bundle describing one charging scenario.
struct TopologyParams {
    Family family = Family::cascaded;
    Variant variant = Variant::nr;
    int n = 1;
    double g_b = 0.0;
    double gamma_c = 0.0;
    std::vector<double> gamma_b;
    double big_gamma = 0.0;
    complex xi{1.0, 0.0};
    std::vector<double> thetas;

    /// Uniform decay rates: gamma_c = gamma_b^(k) = gamma.
    static TopologyParams uniform(Family family, Variant variant, int n, double g_b, double gamma,
                                  double big_gamma, complex xi = {1.0, 0.0});

    [[nodiscard]] TopologyParams with_variant(Variant v) const;
};

[[nodiscard]] std::string_view to_string(ModeRole role);
[[nodiscard]] std::string_view to_string(Family family);
[[nodiscard]] std::string_view to_string(Variant variant);
[[nodiscard]] ModeRole parse_role(std::string_view text);
[[nodiscard]] Family parse_family(std::string_view text);
[[nodiscard]] Variant parse_variant(std::string_view text);

inline constexpr std::string_view charger_id = "c";
[[nodiscard]] std::string battery_id(int k);
[[nodiscard]] std::string intermediate_id(int k);

/// e^{i theta}, exact at integer multiples of pi/2 so that the cancellation
/// behind perfect isolation is not spoiled by cos(pi/2) != 0 in floating point.
[[nodiscard]] complex unit_phasor(double theta);

/// Intermediate coupling g1 = g2 = sqrt(g_b * Gamma / 2) that balances the
/// indirect path against the direct one. Throws std::domain_error for Gamma <= 0.
[[nodiscard]] double matched_coupling(double g_b, double big_gamma);

/// Direct-coupling phases the variant prescribes (all 0 for r2, all -pi/2 for
/// nr, thetas or zeros for r1, thetas for custom).
[[nodiscard]] std::vector<double> direct_phases(const TopologyParams& params);

/// Empty iff the params are usable by the builders.
[[nodiscard]] std::vector<std::string> validate(const TopologyParams& params);

/// Empty iff every NetworkSpec invariant holds; each entry names the
/// offending element.
[[nodiscard]] std::vector<std::string> validate(const NetworkSpec& spec);

[[nodiscard]] NetworkSpec build_cascaded(const TopologyParams& params);
[[nodiscard]] NetworkSpec build_parallel(const TopologyParams& params);
/// Dispatches on params.family.
[[nodiscard]] NetworkSpec build_network(const TopologyParams& params);

}  // namespace qbnet
