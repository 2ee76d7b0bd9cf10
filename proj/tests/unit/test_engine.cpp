#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "emfa/core/io.hpp"
#include "emfa/engine/algorithms.hpp"
#include "emfa/engine/errors.hpp"
#include "emfa/engine/operator.hpp"
#include "emfa/engine/params.hpp"
#include "emfa/engine/phases.hpp"
#include "emfa/sim/control.hpp"
#include "emfa/traffic/simulated_link.hpp"
#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"

using namespace emfa;
using namespace emfa::engine;

namespace {

struct FakeRig {
    FakeRig() : fake(std::make_shared<test::FakeAnalyzer>()) {
        auto f = fake;
        auto ch = std::make_unique<test::ScriptedChannel>([f](const std::string& l) { return (*f)(l); });
        channel = ch.get();
        instrument = std::make_unique<scpi::Instrument>(std::move(ch), clock);
    }
    SimulatedClock clock;
    std::shared_ptr<test::FakeAnalyzer> fake;
    test::ScriptedChannel* channel = nullptr;
    std::unique_ptr<scpi::Instrument> instrument;
};

/// Full engine rig on the simulator: instrument, scene control and link.
struct EngineRig {
    explicit EngineRig(sim::Scene scene, EngineParams p = {})
        : sim(std::move(scene)), plan(sim.state->snapshot().plan), params(p),
          control(std::make_shared<sim::LocalSceneControl>(sim.state)), backend(control, sim.clock, 9),
          ctx{sim.instrument, sim.clock, plan, params, op} {}

    test::SimRig sim;
    BandPlan plan;
    EngineParams params;
    ScriptedOperator op{[this](Step s) {
        control->set_antenna(s == Step::M2 ? sim::EmitterRole::Ue : sim::EmitterRole::Rbs);
        return true;
    }};
    std::shared_ptr<sim::LocalSceneControl> control;
    traffic::SimulatedLinkBackend backend;
    EngineContext ctx;
};

SpectrumTrace flat_trace(double vpm) {
    SpectrumTrace t{Frequency::mhz(791), Frequency::mhz(3620), {}};
    for (auto f : scpi::trace_grid(t.f_start, t.f_stop, 1001)) t.points.push_back({f, FieldStrength{vpm}});
    return t;
}

std::size_t index_near(const SpectrumTrace& t, Frequency f) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < t.points.size(); ++i)
        if (std::llabs((t.points[i].frequency - f).in_hz()) < std::llabs((t.points[best].frequency - f).in_hz())) best = i;
    return best;
}

std::set<std::string> queried_bands(const scpi::CommandTranscript& transcript, const BandPlan& plan, std::size_t from) {
    std::set<std::string> out;
    const auto sent = transcript.lines(scpi::Direction::Sent);
    for (std::size_t i = from; i < sent.size(); ++i) {
        const auto [header, args] = scpi::split_command(sent[i]);
        if (header != "CALC:CHP?") continue;
        const auto lo = Frequency::hz(std::stoll(std::string(args.substr(0, args.find(',')))));
        out.insert(plan.band_containing(lo)->id);
    }
    return out;
}

sim::Scene los_like() {
    sim::Scene s = test::scene_with({test::rbs("B3-DL", -40, 0.3), test::rbs("N78-3600", -50, 0.5),
                                     test::ue("B3-UL", -33), test::ue("N78-3600", -40)},
                                    7);
    s.link = {60, 250};
    return s;
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("params defaults, JSON round trip and validation") {
    const EngineParams d;
    CHECK(d.safety_margin_db == 10);
    CHECK(d.max_time_search_s == 5);
    CHECK(d.y_ticks == 10);
    CHECK(d.adjust_iterations == 3);
    CHECK(d.preamp_threshold.dbm_per_m2() == -48.77);
    CHECK(d.n_samples == 12);
    CHECK(d.int_sample_time_s == 0.5);
    CHECK(d.thre_inc_percent == 30);
    CHECK(d.wide_span_start == Frequency::mhz(791));
    CHECK(d.wide_span_stop == Frequency::mhz(3620));
    CHECK(d.ref_level_active.volts_per_meter() == 6);
    CHECK(d.iperf_duration_s == 120);
    EngineParams p;
    p.thre_inc_percent = 12.5;
    p.per_band_peak = true;
    CHECK(params_from_json(params_to_json(p)) == p);
    CHECK(params_from_json(nlohmann::json::object()) == EngineParams{});
    CHECK_THROWS_AS(params_from_json({{"thre_inc", 30}}), ConfigError);
    CHECK_THROWS_AS(params_from_json({{"adjust_iterations", 0}}), ConfigError);
}

TEST_CASE("adjust matches the hand oracle and sets both levels") {
    FakeRig rig;
    rig.fake->level_off = -52.3;
    const Band band = w3_band_plan().at("B3-DL");
    const EngineParams params;
    const auto r = adjust_ref_level_scale_div(*rig.instrument, rig.clock, p1_adjust_settings(band), band, params,
                                              false, -95.0);
    const auto o = test::alg1_oracle(std::vector<double>(5, -52.3), -95.0, 10.0, 10);
    CHECK(r.ref_level == o.ref_level);
    CHECK(r.scale_div == o.scale_div);
    CHECK(r.ref_level == -42.0);
    CHECK(r.scale_div == 5.3);
    CHECK_FALSE(r.preamp);
    CHECK(rig.clock.now_seconds() == 5.0);
    const auto sent = rig.instrument->transcript().lines(scpi::Direction::Sent);
    CHECK(std::count_if(sent.begin(), sent.end(), [](const std::string& l) { return l.starts_with("CALC:MAX?"); }) == 5);
    CHECK(std::find(sent.begin(), sent.end(), "TRAC:RES") != sent.end());
    CHECK(sent[sent.size() - 2] == "DISP:Y:RLEV -42");
    CHECK(sent.back() == "DISP:Y:PDIV 5.3");
}

TEST_CASE("adjust on a fractional search time polls ceil times") {
    FakeRig rig;
    EngineParams params;
    params.max_time_search_s = 2.5;
    const Band band = w3_band_plan().at("B1-DL");
    adjust_ref_level_scale_div(*rig.instrument, rig.clock, p1_adjust_settings(band), band, params, false, -95.0);
    CHECK(rig.clock.now_seconds() == 3.0);
}

TEST_CASE("sentinel-only readings are a degenerate signal") {
    FakeRig rig;
    rig.fake->level_off = -250.0;
    const Band band = w3_band_plan().at("B3-DL");
    CHECK_THROWS_AS(adjust_ref_level_scale_div(*rig.instrument, rig.clock, p1_adjust_settings(band), band,
                                               EngineParams{}, false, -95.0),
                    DegenerateSignal);
}

TEST_CASE("pre-amp management follows the flowchart") {
    const BandPlan plan = w3_band_plan();
    const Band band = plan.at("B3-DL");
    const EngineParams params;
    struct Case {
        const char* name;
        double off;
        double on;
        bool over_range;
        bool expect_preamp;
    };
    for (const Case c : {Case{"enable", -62.4, -62.9, false, true}, Case{"stay off", -50.5, -50.5, false, false},
                         Case{"revert after gain", -60.0, -58.5, false, false},
                         Case{"revert on over-range", -61.0, -61.0, true, false}}) {
        CAPTURE(c.name);
        FakeRig rig;
        rig.fake->level_off = c.off;
        rig.fake->level_on = c.on;
        rig.fake->over_range_with_preamp = c.over_range;
        auto settings = p1_adjust_settings(band);
        const auto last = adjust_ref_level_scale_div(*rig.instrument, rig.clock, settings, band, params, false, -95.0);
        settings.ref_level = last.ref_level;
        settings.scale_div = last.scale_div;
        const auto r = preamp_management(*rig.instrument, rig.clock, settings, band, plan, params, last);
        const auto o = test::flowchart_oracle(c.off, c.on, c.over_range, -95.0, -107.0, -48.77, 10.0, 10);
        CHECK(r.ref_level == o.ref_level);
        CHECK(r.scale_div == doctest::Approx(o.scale_div).epsilon(1e-15));
        CHECK(r.preamp == o.preamp);
        CHECK(r.preamp == c.expect_preamp);
        CHECK(rig.fake->preamp == c.expect_preamp);
        CHECK(r.scale_div * params.y_ticks == doctest::Approx(std::fabs(r.ref_level - plan.min_level(band.id, r.preamp).dbm_per_m2())));
        if (c.off > -58.77 - 1) {
            const auto sent = rig.instrument->transcript().lines(scpi::Direction::Sent);
            CHECK(std::find(sent.begin(), sent.end(), "INP:GAIN:STAT ON") == sent.end());
        }
        if (std::string(c.name).starts_with("revert")) {
            // The last levels before pre-amplification go back on the instrument first.
            const auto sent = rig.instrument->transcript().lines(scpi::Direction::Sent);
            const auto off = std::find(sent.rbegin(), sent.rend(), "INP:GAIN:STAT OFF");
            REQUIRE(off != sent.rend());
            CHECK(*(off - 1) == "DISP:Y:RLEV " + format_number(last.ref_level));
        }
    }
}

TEST_CASE("nar_band_meas takes n samples int_sample_time apart") {
    test::SimRig rig(test::scene_with({test::rbs("B3-DL", -60)}, 4));
    const BandPlan plan = w3_band_plan();
    const Band band = plan.at("B3-DL");
    EngineParams params;
    const auto series = nar_band_meas(rig.instrument, rig.clock, p1_nar_settings(band, {-50, 4.5, false}, params), band,
                                      params, ExposureSource::RbsEnvironmental);
    CHECK(series.samples.size() == 12);
    CHECK(rig.clock.now_seconds() == doctest::Approx(6.0));
    CHECK(series.timestamps_ordered());
    for (const auto& s : series.samples) CHECK(std::abs(s.value + 60.0) < 0.2);

    params.n_samples = 1;
    CHECK(nar_band_meas(rig.instrument, rig.clock, p1_nar_settings(band, {-50, 4.5, false}, params), band, params,
                        ExposureSource::RbsEnvironmental)
              .samples.size() == 1);
}

TEST_CASE("nar_band_meas in V/m over a UE emitter") {
    auto scene = test::scene_with({test::ue("B3-UL", -40, 0.0)}, 4);
    scene.antenna_target = sim::EmitterRole::Ue;
    test::SimRig rig(scene);
    const Band band = w3_band_plan().at("B3-UL");
    const auto series = nar_band_meas(rig.instrument, rig.clock, active_nar_settings(band, EngineParams{}), band,
                                      EngineParams{}, ExposureSource::UeActive);
    CHECK(series.unit == MeasureUnit::VoltsPerMeter);
    const double expected = std::sqrt(std::pow(10.0, (-40.0 - 30.0) / 10.0) * 376.73);
    for (const auto& s : series.samples) CHECK(s.value == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("a failing query yields the partial series") {
    FakeRig rig;
    rig.fake->chp_failures_after = 3;
    const Band band = w3_band_plan().at("B3-DL");
    try {
        nar_band_meas(*rig.instrument, rig.clock, active_nar_settings(band, EngineParams{}), band, EngineParams{},
                      ExposureSource::RbsActive);
        FAIL("expected PartialSeries");
    } catch (const PartialSeries& e) {
        CHECK(e.partial().samples.size() == 3);
        CHECK(e.partial().band_id == "B3-DL");
    }
}

TEST_CASE("band selection examples") {
    const BandPlan plan = w3_band_plan();
    const double floor = to_field(PowerDensityLog{-95}).volts_per_meter();
    const auto span1 = flat_trace(floor);
    CHECK(sel_band_use(span1, span1, plan, 30).empty());

    auto span2 = span1;
    span2.points[index_near(span2, Frequency::mhz(1750))].field = FieldStrength{floor * 10};
    CHECK(sel_band_use(span1, span2, plan, 30) == std::vector<std::string>{"B3-UL", "B3-DL"});

    span2 = span1;
    span2.points[index_near(span2, Frequency::mhz(3610))].field = FieldStrength{floor * 10};
    CHECK(sel_band_use(span1, span2, plan, 30) == std::vector<std::string>{"N78-3600"});

    span2 = span1;
    span2.points[index_near(span2, Frequency::mhz(1800))].field = FieldStrength{floor * 10};
    CHECK(sel_band_use(span1, span2, plan, 30).empty());

    span2 = span1;
    span2.points.pop_back();
    CHECK_THROWS_AS(sel_band_use(span1, span2, plan, 30), GridMismatch);
}

TEST_CASE("incr_percent guards a floor-level first scan") {
    CHECK(incr_percent(1.3, 1.0, 0.1) == doctest::Approx(30.0));
    CHECK(incr_percent(0.2, 0.0, 0.1) == doctest::Approx(200.0));
    CHECK(incr_percent(0.5, 1.0, 0.1) == doctest::Approx(-50.0));
}

TEST_CASE("band selection properties") {
    const BandPlan plan = w3_band_plan();
    std::mt19937_64 rng(1000);
    std::uniform_real_distribution<double> field(1e-4, 1e-2);
    std::uniform_real_distribution<double> gain(0.5, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        auto span1 = flat_trace(0.0);
        for (auto& p : span1.points) p.field = FieldStrength{field(rng)};
        auto span2 = span1;
        for (auto& p : span2.points) p.field = FieldStrength{p.field.volts_per_meter() * gain(rng)};
        const auto base = sel_band_use(span1, span2, plan, 30);

        auto raised = span2;
        const auto i = rng() % raised.points.size();
        raised.points[i].field = FieldStrength{raised.points[i].field.volts_per_meter() * 3};
        const auto more = sel_band_use(span1, raised, plan, 30);
        for (const auto& id : base) CHECK(std::find(more.begin(), more.end(), id) != more.end());

        CHECK(sel_band_use(span1, span2, plan, 1e300).empty());

        auto one = span1;
        const auto j = index_near(one, Frequency::mhz(2580));
        one.points[j].field = FieldStrength{one.points[j].field.volts_per_meter() * 1.001};
        const auto tiny = sel_band_use(span1, one, plan, 1e-9);
        CHECK(std::find(tiny.begin(), tiny.end(), "B38") != tiny.end());
    }
}

TEST_CASE("per-band peak comparison") {
    const BandPlan plan = w3_band_plan();
    const double floor = to_field(PowerDensityLog{-95}).volts_per_meter();
    auto span1 = flat_trace(floor);
    span1.points[index_near(span1, Frequency::mhz(1750))].field = FieldStrength{floor * 10};
    auto span2 = span1;
    span2.points[index_near(span2, Frequency::mhz(1750))].field = FieldStrength{floor};
    span2.points[index_near(span2, Frequency::mhz(1760))].field = FieldStrength{floor * 11};
    CHECK(sel_band_use(span1, span2, plan, 30, false) == std::vector<std::string>{"B3-UL", "B3-DL"});
    CHECK(sel_band_use(span1, span2, plan, 30, true).empty());
}

TEST_CASE("P1 over the W3 plan") {
    EngineRig rig(los_like());
    const auto p1 = run_p1(rig.ctx);
    CHECK(p1.series.size() == 9);
    CHECK(p1.adjustments.size() == 9);
    const double t = rig.sim.clock.now_seconds();
    CHECK(t >= 189.0);
    CHECK(t < 400.0);
    for (std::size_t i = 0; i < p1.adjustments.size(); ++i) {
        const auto& a = p1.adjustments[i];
        const double floor = rig.plan.min_level(p1.series[i].band_id, a.preamp).dbm_per_m2();
        CHECK(a.scale_div * 10 == doctest::Approx(std::fabs(a.ref_level - floor)));
    }
    for (const auto& s : p1.series) {
        CHECK(s.samples.size() == 12);
        CHECK(s.unit == MeasureUnit::DbmPerM2);
        CHECK(rig.plan.at(s.band_id).carries_downlink());
    }
}

TEST_CASE("P1 on a one-band plan takes at least 21 s") {
    sim::Scene scene = test::scene_with({test::rbs("B3-DL", -45)});
    BandPlan one;
    one.operator_name = "X";
    one.bands = {scene.plan.at("B3-DL")};
    one.bands[0].paired_band.reset();
    one.bands[0].duplex = Duplex::Tdd;
    one.noise_floor.rows = {*scene.plan.noise_floor.find("B3-DL")};
    scene.plan = one;
    EngineRig rig(scene);
    const auto p1 = run_p1(rig.ctx);
    CHECK(p1.series.size() == 1);
    CHECK(rig.sim.clock.now_seconds() >= 21.0);
}

TEST_CASE("P1 with only a 5G pilot") {
    EngineRig rig(test::scene_with({test::rbs("N78-3537", -55)}, 3));
    const auto p1 = run_p1(rig.ctx);
    for (const auto& s : p1.series) {
        const double mean = s.values().front();
        if (s.band_id == "N78-3537") {
            CHECK(std::abs(mean + 55.0) < 0.5);
        } else {
            const auto& a = p1.adjustments[static_cast<std::size_t>(&s - p1.series.data())];
            CHECK(std::abs(mean - rig.plan.min_level(s.band_id, a.preamp).dbm_per_m2()) < 0.5);
        }
    }
}

TEST_CASE("P1 records a dead band at the floor and continues") {
    FakeRig fake;
    fake.fake->level_off = -250;
    const BandPlan plan = w3_band_plan();
    const EngineParams params;
    ScriptedOperator op;
    EngineContext ctx{*fake.instrument, fake.clock, plan, params, op};
    const auto p1 = run_p1(ctx);
    CHECK(p1.series.size() == 9);
    CHECK(p1.notes.size() == 9);
    CHECK(p1.series[0].values() == std::vector<double>(12, -100.0));
}

TEST_CASE("P2 and P3 on a LOS-like scene") {
    EngineRig rig(los_like());
    rig.control->set_antenna(sim::EmitterRole::Ue);
    const auto p2_start = rig.sim.instrument.transcript().lines(scpi::Direction::Sent).size();
    traffic::TrafficSpec spec;
    auto p2 = run_p2(rig.ctx, rig.backend, spec);
    CHECK(p2.selected == std::vector<std::string>{"B3-UL", "B3-DL", "N78-3600"});
    std::vector<std::string> ue_bands;
    for (const auto& s : p2.series) {
        ue_bands.push_back(s.band_id);
        CHECK(s.unit == MeasureUnit::VoltsPerMeter);
        CHECK(s.source == ExposureSource::UeActive);
    }
    CHECK(ue_bands == std::vector<std::string>{"B3-UL", "N78-3600"});
    CHECK(p2.traffic->state() == traffic::SessionState::Running);

    rig.control->set_antenna(sim::EmitterRole::Rbs);
    const auto p3_start = rig.sim.instrument.transcript().lines(scpi::Direction::Sent).size();
    const auto p3 = run_p3(rig.ctx, *p2.traffic, p2.selected);
    std::vector<std::string> rbs_bands;
    for (const auto& s : p3.series) rbs_bands.push_back(s.band_id);
    CHECK(rbs_bands == std::vector<std::string>{"B3-DL", "N78-3600"});
    CHECK(p2.traffic->state() == traffic::SessionState::Stopped);
    CHECK_FALSE(rig.sim.state->snapshot().traffic_active);

    const auto& transcript = rig.sim.instrument.transcript();
    const std::set<std::string> selected(p2.selected.begin(), p2.selected.end());
    for (const auto& id : queried_bands(transcript, rig.plan, p2_start)) CHECK(selected.contains(id));
    CHECK(queried_bands(transcript, rig.plan, p3_start) == std::set<std::string>{"B3-DL", "N78-3600"});
}

TEST_CASE("carrier aggregation on two uplink bands") {
    sim::Scene s = test::scene_with({test::ue("B3-UL", -35), test::ue("B20-UL", -38)}, 5);
    s.antenna_target = sim::EmitterRole::Ue;
    EngineRig rig(s);
    auto p2 = run_p2(rig.ctx, rig.backend, traffic::TrafficSpec{});
    std::vector<std::string> ue_bands;
    for (const auto& x : p2.series) ue_bands.push_back(x.band_id);
    CHECK(ue_bands == std::vector<std::string>{"B20-UL", "B3-UL"});
    p2.traffic->stop();
}

TEST_CASE("no traffic means an empty selection and the traffic is stopped") {
    class DeadControl final : public sim::SceneControl {
    public:
        void set_antenna(sim::EmitterRole) override {}
        void set_traffic(bool, TrafficDirection, double) override { throw std::runtime_error("no link"); }
        sim::LinkCapacity link_capacity() override { throw std::runtime_error("no link"); }
    };
    sim::Scene s = los_like();
    s.antenna_target = sim::EmitterRole::Ue;
    EngineRig rig(s);
    traffic::SimulatedLinkBackend dead(std::make_shared<DeadControl>(), rig.sim.clock);
    CHECK_THROWS_AS(run_p2(rig.ctx, dead, traffic::TrafficSpec{}), EmptySelection);
    CHECK(rig.sim.clock.pending_timers() == 0);
}

TEST_CASE("P3 with an empty selection stops the traffic") {
    EngineRig rig(los_like());
    auto session = rig.backend.start(traffic::TrafficSpec{});
    const auto p3 = run_p3(rig.ctx, *session, {});
    CHECK(p3.series.empty());
    CHECK(session->state() == traffic::SessionState::Stopped);
}

TEST_CASE("expired traffic before P3 is stale") {
    EngineParams params;
    params.iperf_duration_s = 1.0;
    sim::Scene s = los_like();
    s.antenna_target = sim::EmitterRole::Ue;
    EngineRig rig(s, params);
    auto p2 = run_p2(rig.ctx, rig.backend, traffic::TrafficSpec{});
    const auto before = rig.sim.instrument.transcript().size();
    CHECK_THROWS_AS(run_p3(rig.ctx, *p2.traffic, p2.selected), StaleTraffic);
    CHECK(rig.sim.instrument.transcript().size() == before);
}

TEST_CASE("full session and the decline paths") {
    SUBCASE("complete run") {
        EngineRig rig(los_like());
        const auto out = run_session(rig.ctx, rig.backend, traffic::TrafficSpec{}, {"L1", true, 80});
        CHECK_FALSE(out.engine_error);
        CHECK(out.session.phase1.size() == 9);
        CHECK(out.session.phase2.size() == 2);
        CHECK(out.session.phase3.size() == 2);
        CHECK(out.session.throughput_log.size() >= 10);
        CHECK(rig.op.prompts() == std::vector<std::string>{std::string(kPromptM1), std::string(kPromptM2),
                                                           std::string(kPromptM3)});
        CHECK(out.session.location_label == "L1");
    }
    SUBCASE("operator declines M2") {
        EngineRig rig(los_like());
        ScriptedOperator op([](Step s) { return s != Step::M2; });
        EngineContext ctx{rig.sim.instrument, rig.sim.clock, rig.plan, rig.params, op};
        const auto out = run_session(ctx, rig.backend, traffic::TrafficSpec{}, {"L2", true, 80});
        CHECK(out.session.phase1.size() == 9);
        CHECK(out.session.phase2.empty());
        CHECK(out.session.phase3.empty());
        REQUIRE_FALSE(out.session.notes.empty());
        CHECK(out.session.notes.back() == PhaseNote{"M2", "operator declined"});
    }
}

TEST_CASE("stream operator needs a literal ok") {
    std::istringstream in("ok\n  ok \nyes\nOK\n");
    std::ostringstream out;
    StreamOperator op(in, out);
    CHECK(op.confirm(Step::M1, kPromptM1));
    CHECK(op.confirm(Step::M2, kPromptM2));
    CHECK_FALSE(op.confirm(Step::M3, kPromptM3));
    CHECK_FALSE(op.confirm(Step::M3, kPromptM3));
    CHECK_FALSE(op.confirm(Step::M3, kPromptM3));
    CHECK(out.str().starts_with(std::string(kPromptM1) + "\n"));
}

}
