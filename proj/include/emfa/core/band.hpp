#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emfa/core/units.hpp"

namespace emfa {

enum class Duplex { FddUplink, FddDownlink, Tdd };
enum class Generation { Pre5G, NR };

std::string_view to_string(Duplex d);
std::string_view to_string(Generation g);
std::optional<Duplex> parse_duplex(std::string_view s);
std::optional<Generation> parse_generation(std::string_view s);

/// One licensed spectrum block of an operator. The id is the stable key used by
/// noise-floor rows, selections and series; the label is display metadata.
struct Band {
    std::string id;
    std::string label;
    Frequency f_start;
    Frequency f_stop;
    Duplex duplex = Duplex::Tdd;
    Generation generation = Generation::Pre5G;
    std::optional<std::string> paired_band;

    [[nodiscard]] bool contains(Frequency f) const { return f_start <= f && f <= f_stop; }
    [[nodiscard]] bool is_fdd() const { return duplex != Duplex::Tdd; }
    // Bands carrying downlink (RBS) emissions, i.e. the P1/P3 targets.
    [[nodiscard]] bool carries_downlink() const { return duplex != Duplex::FddUplink; }
    // Bands carrying uplink (UE) emissions, i.e. the P2 targets.
    [[nodiscard]] bool carries_uplink() const { return duplex != Duplex::FddDownlink; }
    [[nodiscard]] Frequency width() const { return f_stop - f_start; }

    bool operator==(const Band&) const = default;
};

struct NoiseFloorRow {
    std::string band_id;
    PowerDensityLog level_preamp_off;
    PowerDensityLog level_preamp_on;

    bool operator==(const NoiseFloorRow&) const = default;
};

/// Displayed noise level per band and pre-amplifier state (the min_l matrix).
struct NoiseFloorTable {
    std::vector<NoiseFloorRow> rows;

    [[nodiscard]] const NoiseFloorRow* find(std::string_view band_id) const;

    bool operator==(const NoiseFloorTable&) const = default;
};

struct BandPlan {
    std::string operator_name;
    std::vector<Band> bands;
    NoiseFloorTable noise_floor;

    [[nodiscard]] const Band* find(std::string_view id) const;
    [[nodiscard]] const Band& at(std::string_view id) const;

    /// Band whose closed range contains f. On a shared edge the band with the
    /// lower start wins, so f_stop of the lower block maps to the lower block.
    [[nodiscard]] const Band* band_containing(Frequency f) const;

    /// Noise floor for a band; throws std::out_of_range if there is no row.
    [[nodiscard]] PowerDensityLog min_level(std::string_view band_id, bool preamp) const;

    /// Noise floor at an arbitrary frequency: the containing band's row, else
    /// the closest band starting below f, else the lowest band.
    [[nodiscard]] PowerDensityLog min_level_at(Frequency f, bool preamp) const;

    /// Bands sorted by f_start.
    [[nodiscard]] std::vector<const Band*> sorted_bands() const;

    bool operator==(const BandPlan&) const = default;
};

struct PlanViolation {
    std::string band_id;
    std::string rule;

    bool operator==(const PlanViolation&) const = default;
};

/// Checks every BandPlan invariant. An empty result means the plan is valid.
std::vector<PlanViolation> validate_band_plan(const BandPlan& plan);

/// The W3 allocation used throughout the campaign, with its min_l rows.
BandPlan w3_band_plan();

}  // namespace emfa
