#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "revcast/data/calendar.hpp"
#include "revcast/data/panel_io.hpp"
#include "revcast/data/preprocess.hpp"
#include "revcast/data/synthetic.hpp"

using namespace revcast;

namespace {

const std::string kHeader = std::string(kPanelHeader) + "\n";

Panel parse(const std::string& body) {
    std::istringstream in(kHeader + body);
    return read_panel(in);
}

template <class E>
std::size_t error_line(const std::string& text) {
    std::istringstream in(text);
    try {
        read_panel(in);
    } catch (const E& e) {
        return e.line();
    }
    ADD_FAILURE() << "no error raised";
    return 0;
}

Series flat_series(const std::string& lsg, const std::string& cat, int n, double tpr) {
    Series s;
    s.key = {lsg, cat};
    s.resize(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        s.revenue[t] = 100.0 + t;
        s.tpr_pct[t] = tpr;
        s.adfront_pct[t] = 0.0;
        s.dspback_pct[t] = 12.0 * (t % 2);
        s.net_price[t] = 2.0;
        s.base_price[t] = 2.5;
    }
    return s;
}

}  // namespace

TEST(ParsePanel, WellFormedTwoRows) {
    const auto p = parse("0,L1,C1,100,10,0,5,1.9,2\n1,L1,C1,110,0,0,0,2,2\n");
    ASSERT_EQ(p.size(), 1u);
    const auto& s = p.series().front();
    EXPECT_EQ(s.n_weeks(), 2);
    EXPECT_DOUBLE_EQ(*s.revenue[1], 110.0);
    EXPECT_DOUBLE_EQ(s.tpr_pct[0], 10.0);
    EXPECT_DOUBLE_EQ(s.dspback_pct[0], 5.0);
}

TEST(ParsePanel, EmptyRevenueIsMissing) {
    const auto p = parse("0,L1,C1,,0,0,0,2,2\n1,L1,C1,5,0,0,0,2,2\n");
    EXPECT_FALSE(p.series().front().revenue[0].has_value());
}

TEST(ParsePanel, DuplicateKeyNamesRow) {
    const std::string text = kHeader + "0,L1,C1,100,0,0,0,2,2\n1,L1,C1,100,0,0,0,2,2\n0,L1,C1,90,0,0,0,2,2\n";
    EXPECT_EQ(error_line<DuplicateKeyError>(text), 4u);
}

TEST(ParsePanel, NetAboveBaseIsInvariantError) {
    EXPECT_EQ(error_line<InvariantError>(kHeader + "0,L1,C1,100,0,0,0,2,2\n1,L1,C1,100,0,0,0,2.5,2\n"), 3u);
}

TEST(ParsePanel, NetEqualToBaseWithinToleranceAccepted) {
    EXPECT_NO_THROW(parse("0,L1,C1,100,0,0,0,2.0000000000001,2\n"));
}

TEST(ParsePanel, SchemaErrors) {
    EXPECT_EQ(error_line<SchemaError>("week,lsg,category_id\n"), 1u);
    EXPECT_EQ(error_line<SchemaError>(kHeader + "0,L1,C1,100,0,0,0,2\n"), 2u);
    EXPECT_EQ(error_line<SchemaError>(kHeader + "0,L1,C1,abc,0,0,0,2,2\n"), 2u);
    EXPECT_EQ(error_line<SchemaError>(kHeader + "x,L1,C1,1,0,0,0,2,2\n"), 2u);
    EXPECT_EQ(error_line<SchemaError>(kHeader + "0,,C1,1,0,0,0,2,2\n"), 2u);
}

TEST(ParsePanel, RowInvariants) {
    EXPECT_EQ(error_line<InvariantError>(kHeader + "0,L1,C1,0,0,0,0,2,2\n"), 2u);
    EXPECT_EQ(error_line<InvariantError>(kHeader + "0,L1,C1,-3,0,0,0,2,2\n"), 2u);
    EXPECT_EQ(error_line<InvariantError>(kHeader + "0,L1,C1,1,101,0,0,2,2\n"), 2u);
    EXPECT_EQ(error_line<InvariantError>(kHeader + "0,L1,C1,1,0,-1,0,2,2\n"), 2u);
    EXPECT_EQ(error_line<InvariantError>(kHeader + "0,L1,C1,1,0,0,0,0,2\n"), 2u);
    EXPECT_EQ(error_line<InvariantError>(kHeader + "-1,L1,C1,1,0,0,0,1,2\n"), 2u);
}

TEST(ParsePanel, WeekGapRejected) {
    EXPECT_EQ(error_line<InvariantError>(kHeader + "0,L1,C1,1,0,0,0,1,2\n2,L1,C1,1,0,0,0,1,2\n"), 3u);
}

TEST(ParsePanel, RowOrderDoesNotMatter) {
    const auto a = parse("0,L1,C1,1,0,0,0,1,2\n0,L2,C1,2,0,0,0,1,2\n1,L1,C1,3,0,0,0,1,2\n1,L2,C1,4,0,0,0,1,2\n");
    const auto b = parse("1,L2,C1,4,0,0,0,1,2\n1,L1,C1,3,0,0,0,1,2\n0,L2,C1,2,0,0,0,1,2\n0,L1,C1,1,0,0,0,1,2\n");
    std::ostringstream oa, ob;
    write_panel(oa, a);
    write_panel(ob, b);
    EXPECT_EQ(oa.str(), ob.str());
}

TEST(ParsePanel, MissingFileIsError) { EXPECT_THROW(parse_panel("/nonexistent/panel.csv"), SchemaError); }

TEST(Panel, DuplicateSeriesRejected) {
    Panel p;
    p.add(flat_series("A", "X", 3, 1.0));
    EXPECT_THROW(p.add(flat_series("A", "X", 3, 1.0)), DuplicateKeyError);
    EXPECT_THROW(p.at({"B", "X"}), LookupError);
}

TEST(PanelRoundTrip, SyntheticPanelIsBitwiseStable) {
    SynthConfig cfg;
    cfg.n_lsg = 3;
    cfg.n_category = 4;
    cfg.n_weeks = 30;
    cfg.seed = 99;
    auto panel = generate_synthetic(cfg).panel;
    panel.series()[2].revenue[5].reset();
    std::ostringstream first;
    write_panel(first, panel);
    std::istringstream in(first.str());
    const auto back = read_panel(in);
    ASSERT_EQ(back.size(), panel.size());
    for (std::size_t i = 0; i < panel.size(); ++i) {
        const auto& a = panel.series()[i];
        const auto& b = back.series()[i];
        EXPECT_EQ(a.key, b.key);
        EXPECT_EQ(a.first_week, b.first_week);
        EXPECT_EQ(a.revenue, b.revenue);
        EXPECT_EQ(a.tpr_pct, b.tpr_pct);
        EXPECT_EQ(a.adfront_pct, b.adfront_pct);
        EXPECT_EQ(a.dspback_pct, b.dspback_pct);
        EXPECT_EQ(a.net_price, b.net_price);
        EXPECT_EQ(a.base_price, b.base_price);
    }
    std::ostringstream second;
    write_panel(second, back);
    EXPECT_EQ(first.str(), second.str());
}

TEST(Preprocess, ZeroCovariateDropped) {
    Panel p;
    p.add(flat_series("A", "X", 20, 7.0));
    p.add(flat_series("B", "X", 20, 7.0));
    const auto r = preprocess(p);
    EXPECT_TRUE(r.panel.excluded("X").contains("adfront_pct"));
    EXPECT_EQ(r.panel.active_discounts("X"), (std::vector<std::string>{"tpr_pct", "dspback_pct"}));
    bool found = false;
    for (const auto& a : r.report.actions)
        if (a.kind == PreprocessAction::Kind::dropped && a.covariate == "adfront_pct" && a.category_id == "X") found = true;
    EXPECT_TRUE(found);
}

TEST(Preprocess, ConstantCovariateJitteredWithinFourSigma) {
    Panel p;
    p.add(flat_series("A", "X", 200, 5.0));
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        PreprocessConfig cfg;
        cfg.jitter_sd = 0.1;
        cfg.seed = seed;
        const auto r = preprocess(p, cfg);
        const auto& v = r.panel.series().front().tpr_pct;
        double lo = 1e9, hi = -1e9;
        for (double x : v) {
            EXPECT_GE(x, 4.6);
            EXPECT_LE(x, 5.4);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        EXPECT_LT(lo, hi);
        EXPECT_NEAR(oracle::variance(v), 0.01, 0.004);
    }
}

TEST(Preprocess, VaryingCovariatePassesThrough) {
    Panel p;
    auto s = flat_series("A", "X", 100, 0.0);
    for (int t = 0; t < 100; ++t) s.tpr_pct[t] = (t % 2 == 0) ? 2.0 : 18.0;  // sd about 8
    p.add(s);
    const auto r = preprocess(p);
    EXPECT_EQ(r.panel.series().front().tpr_pct, s.tpr_pct);
    EXPECT_EQ(r.panel.series().front().dspback_pct, s.dspback_pct);
}

TEST(Preprocess, JitterClippedAtZero) {
    Panel p;
    auto s = flat_series("A", "X", 200, 0.0);
    s.tpr_pct[0] = 3.0;  // not negligible, nearly static
    p.add(s);
    PreprocessConfig cfg;
    cfg.jitter_trigger = 1.0;
    const auto r = preprocess(p, cfg);
    for (double x : r.panel.series().front().tpr_pct) EXPECT_GE(x, 0.0);
}

TEST(Preprocess, IdempotentAndSeeded) {
    SynthConfig sc;
    sc.n_lsg = 2;
    sc.n_category = 3;
    sc.n_weeks = 40;
    sc.regime_switch_prob = 0.0;
    const auto panel = generate_synthetic(sc).panel;
    const auto once = preprocess(panel);
    const auto twice = preprocess(once.panel);
    EXPECT_EQ(once.report, twice.report);
    std::ostringstream a, b;
    write_panel(a, once.panel);
    write_panel(b, twice.panel);
    EXPECT_EQ(a.str(), b.str());
    const auto again = preprocess(panel);
    std::ostringstream c;
    write_panel(c, again.panel);
    EXPECT_EQ(a.str(), c.str());
    EXPECT_FALSE(once.report.actions.empty());
}

TEST(Synthetic, NoNoiseNoEffectsIsConstant) {
    SynthConfig cfg;
    cfg.n_lsg = 2;
    cfg.n_category = 2;
    cfg.n_weeks = 20;
    cfg.lsg_scales = {1.0, 3.0};
    cfg.noise_sd = {0.0, 0.0};
    cfg.category_levels = {500.0, 800.0};
    cfg.effects = {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    cfg.seasonal_amplitude = 0.0;
    const auto out = generate_synthetic(cfg);
    for (const auto& s : out.panel.series()) {
        const double scale = s.key.lsg_id == "LSG01" ? 1.0 : 3.0;
        const double level = s.key.category_id == "CAT001" ? 500.0 : 800.0;
        for (const auto& r : s.revenue) EXPECT_NEAR(*r, scale * level, 1e-9 * scale * level);
    }
}

TEST(Synthetic, SameSeedSamePanel) {
    SynthConfig cfg;
    cfg.n_lsg = 3;
    cfg.n_category = 5;
    cfg.n_weeks = 60;
    cfg.seed = 5;
    std::ostringstream a, b;
    write_panel(a, generate_synthetic(cfg).panel);
    write_panel(b, generate_synthetic(cfg).panel);
    EXPECT_EQ(a.str(), b.str());
    cfg.seed = 6;
    std::ostringstream c;
    write_panel(c, generate_synthetic(cfg).panel);
    EXPECT_NE(a.str(), c.str());
}

TEST(Synthetic, OutputPassesValidation) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SynthConfig cfg;
        cfg.n_lsg = 4;
        cfg.n_category = 6;
        cfg.n_weeks = 80;
        cfg.seed = seed;
        cfg.price_elasticity = -1.0;
        cfg.holidays = {{10, 1.8}, {50, 0.6}};
        cfg.cross_effects = {{0, 1, 0.02}};
        std::ostringstream out;
        write_panel(out, generate_synthetic(cfg).panel);
        std::istringstream in(out.str());
        EXPECT_NO_THROW(read_panel(in));
    }
}

TEST(Synthetic, OlsRecoversTprCoefficient) {
    // Constant effects, so log revenue is exactly linear in the regressors.
    int within = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        SynthConfig cfg;
        cfg.n_lsg = 3;
        cfg.n_category = 2;
        cfg.n_weeks = 156;
        cfg.effect_variation = 0.0;
        cfg.noise_sd = {0.05, 0.05, 0.05};
        cfg.seed = seed;
        const auto out = generate_synthetic(cfg);
        for (const auto& s : out.panel.series()) {
            const auto& truth =
                out.truth.categories[s.key.category_id == "CAT001" ? 0 : 1];
            Eigen::MatrixXd x(s.n_weeks(), 5);
            Eigen::VectorXd y(s.n_weeks());
            for (int t = 0; t < s.n_weeks(); ++t) {
                x.row(t) << 1.0, std::sin(2 * std::numbers::pi * t / 52.0), s.tpr_pct[t], s.adfront_pct[t],
                    s.dspback_pct[t];
                y(t) = std::log(*s.revenue[t]);
            }
            const auto fit = oracle::ols(x, y);
            const double truth_tpr = truth.effects[0][0];
            ++total;
            if (std::abs(fit.beta(2) - truth_tpr) <= 2.0 * fit.se(2)) ++within;
        }
    }
    // Two standard errors hold about 95% of the time.
    EXPECT_GE(static_cast<double>(within) / total, 0.85) << within << "/" << total;
}

TEST(Synthetic, GroundTruthRoundTrip) {
    SynthConfig cfg;
    cfg.n_lsg = 1;
    cfg.n_category = 2;
    cfg.n_weeks = 5;
    cfg.holidays = {{3, 2.0}};
    cfg.cross_effects = {{0, 1, 0.01}};
    const auto out = generate_synthetic(cfg);
    std::ostringstream os;
    write_ground_truth(os, out.truth);
    std::istringstream is(os.str());
    const auto rows = read_ground_truth(is);
    EXPECT_EQ(rows.size(), 2u * (1 + 5 * 4) + 1 + 1);
    EXPECT_EQ(rows.back().quantity, "holiday_multiplier");
    EXPECT_DOUBLE_EQ(rows.back().value, 2.0);
}

TEST(Synthetic, HolidaySpikeAppliesMultiplier) {
    SynthConfig cfg;
    cfg.n_lsg = 1;
    cfg.n_category = 1;
    cfg.n_weeks = 10;
    cfg.noise_sd = {0.0};
    cfg.effects = {{0.0, 0.0, 0.0}};
    cfg.seasonal_amplitude = 0.0;
    cfg.holidays = {{4, 2.5}};
    const auto s = generate_synthetic(cfg).panel.series().front();
    EXPECT_NEAR(*s.revenue[4] / *s.revenue[3], 2.5, 1e-12);
}

TEST(Synthetic, InvalidConfigRejected) {
    SynthConfig cfg;
    cfg.n_lsg = 2;
    cfg.lsg_scales = {1.0};
    EXPECT_THROW(generate_synthetic(cfg), ConfigError);
    cfg.lsg_scales = {1.0, -1.0};
    EXPECT_THROW(generate_synthetic(cfg), ConfigError);
    cfg.lsg_scales = {};
    cfg.holidays = {{500, 2.0}};
    EXPECT_THROW(generate_synthetic(cfg), ConfigError);
}

TEST(Calendar, WeekMapping) {
    const WeekCalendar cal(parse_date("2019-01-07"));
    EXPECT_EQ(cal.week_of(parse_date("2019-01-07")), 0);
    EXPECT_EQ(cal.week_of(parse_date("2019-01-13")), 0);
    EXPECT_EQ(cal.week_of(parse_date("2019-01-14")), 1);
    EXPECT_EQ(cal.week_of(parse_date("2019-12-25")), 50);
    EXPECT_EQ(cal.week_of(parse_date("2019-01-06")), -1);
    EXPECT_EQ(format_date(cal.date_of(52)), "2020-01-06");
    EXPECT_EQ(weeks_of(cal, {"2019-01-21", "2020-01-06"}), (std::vector<int>{2, 52}));
}

TEST(Calendar, BadDatesRejected) {
    EXPECT_THROW(parse_date("2019-02-30"), ConfigError);
    EXPECT_THROW(parse_date("2019/01/01"), ConfigError);
    EXPECT_THROW(parse_date("19-01-01"), ConfigError);
}
