#include "emfa/core/band.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace emfa {

std::string_view to_string(Duplex d) {
    switch (d) {
        case Duplex::FddUplink: return "FDD_UL";
        case Duplex::FddDownlink: return "FDD_DL";
        case Duplex::Tdd: return "TDD";
    }
    return "?";
}

std::string_view to_string(Generation g) {
    return g == Generation::NR ? "NR" : "PRE5G";
}

std::optional<Duplex> parse_duplex(std::string_view s) {
    if (s == "FDD_UL") return Duplex::FddUplink;
    if (s == "FDD_DL") return Duplex::FddDownlink;
    if (s == "TDD") return Duplex::Tdd;
    return std::nullopt;
}

std::optional<Generation> parse_generation(std::string_view s) {
    if (s == "PRE5G") return Generation::Pre5G;
    if (s == "NR") return Generation::NR;
    return std::nullopt;
}

const NoiseFloorRow* NoiseFloorTable::find(std::string_view band_id) const {
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const NoiseFloorRow& r) { return r.band_id == band_id; });
    return it == rows.end() ? nullptr : &*it;
}

const Band* BandPlan::find(std::string_view id) const {
    auto it = std::find_if(bands.begin(), bands.end(), [&](const Band& b) { return b.id == id; });
    return it == bands.end() ? nullptr : &*it;
}

const Band& BandPlan::at(std::string_view id) const {
    if (const Band* b = find(id)) return *b;
    throw std::out_of_range("unknown band id: " + std::string(id));
}

std::vector<const Band*> BandPlan::sorted_bands() const {
    std::vector<const Band*> out;
    out.reserve(bands.size());
    for (const auto& b : bands) out.push_back(&b);
    std::stable_sort(out.begin(), out.end(),
                     [](const Band* a, const Band* b) { return a->f_start < b->f_start; });
    return out;
}

const Band* BandPlan::band_containing(Frequency f) const {
    for (const Band* b : sorted_bands())
        if (b->contains(f)) return b;
    return nullptr;
}

PowerDensityLog BandPlan::min_level(std::string_view band_id, bool preamp) const {
    const NoiseFloorRow* row = noise_floor.find(band_id);
    if (!row) throw std::out_of_range("no noise-floor row for band " + std::string(band_id));
    return preamp ? row->level_preamp_on : row->level_preamp_off;
}

PowerDensityLog BandPlan::min_level_at(Frequency f, bool preamp) const {
    auto sorted = sorted_bands();
    if (sorted.empty()) throw std::out_of_range("empty band plan");
    const Band* pick = band_containing(f);
    if (!pick) {
        pick = sorted.front();
        for (const Band* b : sorted)
            if (b->f_start <= f) pick = b;
    }
    return min_level(pick->id, preamp);
}

std::vector<PlanViolation> validate_band_plan(const BandPlan& plan) {
    std::vector<PlanViolation> out;
    auto flag = [&](const std::string& id, std::string rule) { out.push_back({id, std::move(rule)}); };

    std::map<std::string, int> seen;
    for (const auto& b : plan.bands)
        if (++seen[b.id] == 2) flag(b.id, "duplicate band id");

    for (const auto& b : plan.bands) {
        if (!b.f_start.valid() || !b.f_stop.valid()) flag(b.id, "frequencies must be positive");
        if (!(b.f_start < b.f_stop)) flag(b.id, "f_start must be below f_stop");

        if (b.duplex == Duplex::Tdd) {
            if (b.paired_band) flag(b.id, "TDD band must not have a pair");
        } else if (!b.paired_band) {
            flag(b.id, "FDD band requires a paired band");
        } else {
            const Band* pair = plan.find(*b.paired_band);
            if (!pair) {
                flag(b.id, "paired band '" + *b.paired_band + "' missing from plan");
            } else {
                if (pair->paired_band != b.id) flag(b.id, "pairing is not mutual");
                const bool ul_dl = (b.duplex == Duplex::FddUplink && pair->duplex == Duplex::FddDownlink) ||
                                   (b.duplex == Duplex::FddDownlink && pair->duplex == Duplex::FddUplink);
                if (!ul_dl) flag(b.id, "pair must link FDD_UL with FDD_DL");
            }
        }

        const NoiseFloorRow* row = plan.noise_floor.find(b.id);
        if (!row) {
            flag(b.id, "missing noise-floor row");
        } else if (!(row->level_preamp_on < row->level_preamp_off)) {
            flag(b.id, "pre-amp noise floor must be below the pre-amp-off floor");
        }
    }

    auto sorted = plan.sorted_bands();
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        // Closed ranges may share an edge; anything beyond that is overlap.
        if (sorted[i]->f_start < sorted[i - 1]->f_stop)
            flag(sorted[i]->id, "overlaps band '" + sorted[i - 1]->id + "'");
    }

    for (const auto& row : plan.noise_floor.rows)
        if (!plan.find(row.band_id)) flag(row.band_id, "noise-floor row for unknown band");
    return out;
}

namespace {

Band fdd(std::string id, double start_mhz, double stop_mhz, Duplex d, std::string pair) {
    return Band{id, id, Frequency::from_mhz(start_mhz), Frequency::from_mhz(stop_mhz), d,
                Generation::Pre5G, std::move(pair)};
}

Band tdd(std::string id, std::string label, double start_mhz, double stop_mhz, Generation g) {
    return Band{std::move(id), std::move(label), Frequency::from_mhz(start_mhz),
                Frequency::from_mhz(stop_mhz), Duplex::Tdd, g, std::nullopt};
}

}  // namespace

BandPlan w3_band_plan() {
    BandPlan plan;
    plan.operator_name = "W3";
    // Start frequencies are the min_l row keys. 4G stop frequencies other than
    // B3 are assumed block widths (see data/w3_plan.json notes).
    plan.bands = {
        fdd("B20-DL", 791, 801, Duplex::FddDownlink, "B20-UL"),
        fdd("B20-UL", 832, 842, Duplex::FddUplink, "B20-DL"),
        fdd("B8-UL", 905, 915, Duplex::FddUplink, "B8-DL"),
        fdd("B8-DL", 950, 960, Duplex::FddDownlink, "B8-UL"),
        fdd("B3-UL", 1745, 1765, Duplex::FddUplink, "B3-DL"),
        fdd("B3-DL", 1840, 1860, Duplex::FddDownlink, "B3-UL"),
        fdd("B1-UL", 1920, 1935, Duplex::FddUplink, "B1-DL"),
        fdd("B1-DL", 2110, 2125, Duplex::FddDownlink, "B1-UL"),
        fdd("B7-UL", 2550, 2570, Duplex::FddUplink, "B7-DL"),
        tdd("B38", "B38-TDD", 2570, 2585, Generation::Pre5G),
        fdd("B7-DL", 2670, 2690, Duplex::FddDownlink, "B7-UL"),
        tdd("N78-3437", "N78", 3437, 3457, Generation::NR),
        tdd("N78-3537", "N78", 3537, 3557, Generation::NR),
        tdd("N78-3600", "N78", 3600, 3620, Generation::NR),
    };
    auto row = [](std::string id, double off, double on) {
        return NoiseFloorRow{std::move(id), PowerDensityLog{off}, PowerDensityLog{on}};
    };
    plan.noise_floor.rows = {
        row("B20-DL", -100, -115), row("B20-UL", -100, -115), row("B8-UL", -100, -115),
        row("B8-DL", -100, -115),  row("B3-UL", -95, -107),   row("B3-DL", -95, -107),
        row("B1-UL", -95, -107),   row("B1-DL", -95, -107),   row("B7-UL", -90, -103),
        row("B38", -90, -103),     row("B7-DL", -90, -103),   row("N78-3437", -85, -97),
        row("N78-3537", -85, -97), row("N78-3600", -85, -97),
    };
    return plan;
}

}  // namespace emfa
