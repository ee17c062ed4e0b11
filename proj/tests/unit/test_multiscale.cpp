#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "revcast/data/synthetic.hpp"
#include "revcast/dlm/sampling.hpp"
#include "revcast/multiscale/aggregate.hpp"
#include "revcast/multiscale/netprice.hpp"
#include "revcast/multiscale/pair_model.hpp"
#include "revcast/multiscale/study.hpp"
#include "revcast/multiscale/study_io.hpp"

using namespace revcast;
using namespace revcast::multiscale;

namespace {

Series make_series(const std::string& lsg, const std::string& cat, int n, double revenue, double tpr) {
    Series s;
    s.key = {lsg, cat};
    s.resize(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        s.revenue[t] = revenue;
        s.tpr_pct[t] = tpr;
        s.adfront_pct[t] = 0.0;
        s.dspback_pct[t] = 0.0;
        s.net_price[t] = 2.0;
        s.base_price[t] = 2.0;
    }
    return s;
}

SynthConfig small_config(std::uint64_t seed, int lsgs = 3, int cats = 2, int weeks = 104) {
    SynthConfig cfg;
    cfg.n_lsg = lsgs;
    cfg.n_category = cats;
    cfg.n_weeks = weeks;
    cfg.seed = seed;
    return cfg;
}

StudyConfig fast_study() {
    StudyConfig cfg;
    cfg.tune = false;
    cfg.mc_samples = 0;
    return cfg;
}

std::string forecasts_csv(const StudyResult& r) {
    std::ostringstream out;
    write_forecasts(out, r.records);
    return out.str();
}

}  // namespace

TEST(AggregateCategory, SumsRevenueAndAveragesDiscounts) {
    Panel p;
    p.add(make_series("L1", "C", 5, 100.0, 10.0));
    p.add(make_series("L2", "C", 5, 200.0, 20.0));
    p.add(make_series("L1", "D", 5, 7.0, 0.0));
    const auto agg = aggregate_category(p, "C");
    ASSERT_EQ(agg.n_weeks(), 5);
    for (int t = 0; t < 5; ++t) {
        EXPECT_DOUBLE_EQ(*agg.revenue[t], 300.0);
        EXPECT_DOUBLE_EQ(agg.discounts.column("tpr_pct")[t], 15.0);
    }
}

TEST(AggregateCategory, SingleLsgEqualsItsSeries) {
    Panel p;
    auto s = make_series("L1", "C", 6, 50.0, 3.0);
    for (int t = 0; t < 6; ++t) {
        s.revenue[t] = 40.0 + t;
        s.tpr_pct[t] = t;
    }
    p.add(s);
    const auto agg = aggregate_category(p, "C");
    for (int t = 0; t < 6; ++t) {
        EXPECT_EQ(*agg.revenue[t], *s.revenue[t]);
        EXPECT_EQ(agg.discounts.column("tpr_pct")[t], s.tpr_pct[t]);
    }
}

TEST(AggregateCategory, AbsentCategoryIsLookupError) {
    Panel p;
    p.add(make_series("L1", "C", 5, 1.0, 0.0));
    EXPECT_THROW(aggregate_category(p, "Z"), LookupError);
}

TEST(AggregateCategory, SumMatchesIngestedRevenueExactly) {
    const auto panel = generate_synthetic(small_config(3, 4, 3, 30)).panel;
    for (const auto& cat : panel.categories()) {
        const auto agg = aggregate_category(panel, cat);
        for (int w = 0; w < 30; ++w) {
            double total = 0.0;
            for (const auto& s : panel.series())
                if (s.key.category_id == cat) total += *s.revenue[w];
            EXPECT_EQ(*agg.revenue[w], total);
        }
    }
}

TEST(AggregateCategory, DroppedCovariateLeavesSchema) {
    Panel p;
    p.add(make_series("L1", "C", 20, 10.0, 5.0));
    p.exclude("C", "adfront_pct");
    const auto agg = aggregate_category(p, "C");
    EXPECT_EQ(agg.discounts.names(), (std::vector<std::string>{"tpr_pct", "dspback_pct"}));
    const auto e = fit_aggregate(agg, ModelSettings{});
    EXPECT_EQ(e.names, agg.discounts.names());
    EXPECT_EQ(e.means.front().size(), 2);
}

TEST(FitAggregate, RecoversConstantTprCoefficient) {
    auto cfg = small_config(11, 9, 1, 104);
    cfg.effects = {{0.02, 0.01, 0.01}};
    cfg.effect_variation = 0.0;
    cfg.lsg_discount_perturbation = 0.0;
    cfg.noise_sd.assign(9, 0.05);
    const auto panel = generate_synthetic(cfg).panel;
    const auto e = fit_aggregate(aggregate_category(panel, "CAT001"), ModelSettings{});
    ASSERT_EQ(e.n_weeks(), 104);
    EXPECT_NEAR(e.means.back()(e.index_of("tpr_pct")), 0.02, 0.005);
}

TEST(FitAggregate, DrawsReproducible) {
    const auto panel = generate_synthetic(small_config(2)).panel;
    const auto agg = aggregate_category(panel, "CAT001");
    const auto a = fit_aggregate(agg, ModelSettings{}, 20, 7);
    const auto b = fit_aggregate(agg, ModelSettings{}, 20, 7);
    ASSERT_EQ(a.draws.size(), 104u);
    for (std::size_t t = 0; t < a.draws.size(); t += 13)
        for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(a.draws[t][i], b.draws[t][i]);
}

TEST(RegressionEffect, Examples) {
    EXPECT_DOUBLE_EQ(regression_effect({{"tpr", 10}, {"ad", 0}, {"dsp", 0}}, {{"tpr", 0.02}, {"ad", 0.5}, {"dsp", 0.5}}),
                     0.2);
    EXPECT_DOUBLE_EQ(regression_effect({{"tpr", 0}, {"ad", 0}}, {{"tpr", 3.0}, {"ad", -1.0}}), 0.0);
    EXPECT_THROW(regression_effect({{"tpr", 1}}, {{"ad", 1}}), NameMismatchError);
    EXPECT_THROW(regression_effect({{"tpr", 1}}, {{"tpr", 1}, {"ad", 1}}), NameMismatchError);
}

TEST(RegressionEffect, MonteCarloMeanMatchesPlugIn) {
    const auto panel = generate_synthetic(small_config(4)).panel;
    const auto e = fit_aggregate(aggregate_category(panel, "CAT002"), ModelSettings{});
    const auto w = static_cast<std::size_t>(80);
    dlm::StatePosterior post{80, e.means[w], e.covariances[w], e.dof[w], 1.0};
    const auto draws = dlm::sample_states(post, 10000, 21);
    const std::map<std::string, double> x{{"tpr_pct", 12.0}, {"adfront_pct", 4.0}, {"dspback_pct", 7.0}};
    std::vector<double> vals;
    for (const auto& th : draws) {
        std::map<std::string, double> theta;
        for (std::size_t k = 0; k < e.names.size(); ++k) theta[e.names[k]] = th(static_cast<Eigen::Index>(k));
        vals.push_back(regression_effect(x, theta));
    }
    double plug = 0.0;
    for (std::size_t k = 0; k < e.names.size(); ++k) plug += x.at(e.names[k]) * e.means[w](static_cast<Eigen::Index>(k));
    const double se = std::sqrt(oracle::variance(vals) / static_cast<double>(vals.size()));
    EXPECT_LT(std::abs(oracle::mean(vals) - plug), 4 * se);
}

TEST(MultiscaleRegressors, ProductsAndZeroEffects) {
    EffectTrajectory e;
    e.category_id = "C";
    e.names = {"tpr_pct"};
    e.means = {Eigen::VectorXd::Constant(1, 0.02), Eigen::VectorXd::Constant(1, 0.03)};
    dlm::CovariateTable local(2);
    local.set("tpr_pct", {10.0, 5.0});
    const auto out = build_multiscale_regressors(local, 0, e);
    EXPECT_DOUBLE_EQ(out.column("ms_tpr_pct")[0], 0.2);
    EXPECT_DOUBLE_EQ(out.column("ms_tpr_pct")[1], 0.15);
    const auto lagged = build_multiscale_regressors(local, 0, e, 1);
    EXPECT_DOUBLE_EQ(lagged.column("ms_tpr_pct")[0], 0.0);
    EXPECT_DOUBLE_EQ(lagged.column("ms_tpr_pct")[1], 0.1);
    e.means = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
    const auto zero = build_multiscale_regressors(local, 0, e);
    for (double v : zero.column("ms_tpr_pct")) EXPECT_EQ(v, 0.0);
}

TEST(MultiscaleRegressors, MisalignedWeeksError) {
    EffectTrajectory e;
    e.names = {"tpr_pct"};
    e.means = {Eigen::VectorXd::Constant(1, 0.02)};
    dlm::CovariateTable local(3);
    local.set("tpr_pct", {1.0, 2.0, 3.0});
    EXPECT_THROW(build_multiscale_regressors(local, 0, e), AlignmentError);
}

TEST(MultiscaleRegressors, ColumnOrderDoesNotMatter) {
    const auto panel = generate_synthetic(small_config(5)).panel;
    const auto e = fit_aggregate(aggregate_category(panel, "CAT001"), ModelSettings{});
    const auto& s = panel.at({"LSG02", "CAT001"});
    dlm::CovariateTable fwd(104), rev(104);
    for (auto n : kDiscountNames) fwd.set(std::string(n), s.discount(n));
    for (auto it = kDiscountNames.rbegin(); it != kDiscountNames.rend(); ++it) rev.set(std::string(*it), s.discount(*it));
    const auto a = build_multiscale_regressors(fwd, 0, e, 1);
    const auto b = build_multiscale_regressors(rev, 0, e, 1);
    const auto structure = revenue_structure(ModelSettings{}, a.names());
    std::vector<dlm::Observation> y;
    for (const auto& r : s.revenue) y.emplace_back(std::log(*r));
    const auto prior = dlm::default_prior(structure, y);
    const auto fa = dlm::filter_series(structure, a, y, prior);
    const auto fb = dlm::filter_series(structure, b, y, prior);
    for (std::size_t t = 0; t < y.size(); ++t) EXPECT_TRUE(fa.posteriors[t].same_moments(fb.posteriors[t]));
}

TEST(NetPrice, FlatPriceForecastStaysFlat) {
    auto s = make_series("L", "C", 104, 10.0, 0.0);
    for (int t = 0; t < 104; ++t) {
        s.net_price[t] = 3.5;
        s.base_price[t] = 3.5;
    }
    const auto m = fit_netprice(s, {"tpr_pct"}, ModelSettings{});
    for (double v : m.median_path(91, 12)) EXPECT_NEAR(v, 3.5, 0.035);
}

TEST(NetPrice, MedianIsExpOfLocation) {
    const auto panel = generate_synthetic(small_config(6)).panel;
    const auto m = fit_netprice(panel.series().front(), panel.active_discounts("CAT001"), ModelSettings{});
    const auto fc = m.forecast(60, 12);
    const auto med = m.median_path(60, 12);
    for (int j = 0; j < 12; ++j) {
        EXPECT_DOUBLE_EQ(med[j], std::exp(fc[j].location));
        EXPECT_NEAR(std::log(med[j]), fc[j].quantile(0.5), 1e-9);
    }
}

TEST(NetPrice, HigherTprLowersPriceForecast) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::uniform_real_distribution<double> u(0.0, 30.0);
    auto s = make_series("L", "C", 104, 10.0, 0.0);
    for (int t = 0; t < 104; ++t) {
        s.tpr_pct[t] = (t / 4) % 3 == 0 ? 0.0 : u(rng);
        s.base_price[t] = 4.0;
        s.net_price[t] = std::min(4.0, 4.0 * (1.0 - 0.01 * s.tpr_pct[t]) + noise(rng));
    }
    const auto m = fit_netprice(s, {"tpr_pct"}, ModelSettings{});
    const auto& post = m.posterior_at(90);
    EXPECT_LT(post.m(m.structure().index_of("tpr_pct")), 0.0);
    dlm::CovariateTable lo(1), hi(1);
    lo.set("tpr_pct", {0.0});
    lo.set(kLogBasePrice, {std::log(4.0)});
    hi.set("tpr_pct", {25.0});
    hi.set(kLogBasePrice, {std::log(4.0)});
    EXPECT_LT(m.forecast(90, hi, 1)[0].location, m.forecast(90, lo, 1)[0].location);
}

TEST(NetPrice, NonPositivePriceIsDataError) {
    auto s = make_series("L", "C", 10, 10.0, 0.0);
    s.net_price[4] = 0.0;
    EXPECT_THROW(fit_netprice(s, {"tpr_pct"}, ModelSettings{}), DataError);
}

TEST(PairModel, ZeroEffectsMultiscaleEqualsZeroDiscountBaseline) {
    const auto panel = generate_synthetic(small_config(9, 1, 1)).panel;
    auto s = panel.series().front();
    for (auto n : kDiscountNames) std::fill(s.discount(n).begin(), s.discount(n).end(), 0.0);
    auto s_ms = panel.series().front();
    EffectTrajectory zero;
    zero.category_id = s.key.category_id;
    for (auto n : kDiscountNames) zero.names.emplace_back(n);
    zero.means.assign(104, Eigen::VectorXd::Zero(3));
    PairContext base;
    base.series = &s;
    base.discounts = zero.names;
    PairContext ms = base;
    ms.series = &s_ms;
    ms.effects = &zero;
    PairModel a(base, Variant::baseline, ModelSettings{});
    PairModel b(ms, Variant::ms, ModelSettings{});
    a.run();
    b.run();
    for (int origin : {40, 70, 91}) {
        const auto fa = a.forecast(origin, 12);
        const auto fb = b.forecast(origin, 12);
        for (int j = 0; j < 12; ++j) {
            EXPECT_NEAR(fa[j].location, fb[j].location, 1e-12);
            EXPECT_NEAR(fa[j].scale, fb[j].scale, 1e-12);
            EXPECT_NEAR(fa[j].dof, fb[j].dof, 1e-12);
        }
    }
}

TEST(PairModel, MissingPrerequisitesAreConfigErrors) {
    const auto panel = generate_synthetic(small_config(1)).panel;
    PairContext ctx;
    ctx.series = &panel.series().front();
    ctx.discounts = panel.active_discounts("CAT001");
    for (auto v : {Variant::ms, Variant::net, Variant::ms_net}) EXPECT_THROW(PairModel(ctx, v, ModelSettings{}), ConfigError);
    EXPECT_THROW(PairModel(PairContext{}, Variant::baseline, ModelSettings{}), ConfigError);
    EXPECT_THROW(parse_variant("MULTI"), ConfigError);
    for (auto v : kAllVariants) EXPECT_EQ(parse_variant(to_string(v)), v);
}

TEST(PairModel, ForecastBeyondDataIsAlignmentError) {
    const auto panel = generate_synthetic(small_config(1)).panel;
    PairContext ctx;
    ctx.series = &panel.series().front();
    ctx.discounts = panel.active_discounts("CAT001");
    PairModel m(ctx, Variant::baseline, ModelSettings{});
    m.run();
    EXPECT_THROW(m.forecast(95, 12), AlignmentError);
    EXPECT_NO_THROW(m.forecast(91, 12));
}

TEST(PairModel, NetForecastDeterministicAndLinearInPrice) {
    const auto panel = generate_synthetic(small_config(12)).panel;
    const auto& s = panel.series().front();
    const auto discounts = panel.active_discounts(s.key.category_id);
    const auto price = fit_netprice(s, discounts, ModelSettings{});
    PairContext ctx;
    ctx.series = &s;
    ctx.discounts = discounts;
    ctx.price = &price;
    PairModel m(ctx, Variant::net, ModelSettings{});
    m.run();
    const auto a = m.forecast(70, 12);
    const auto b = forecast_pair(s.key, Variant::net, 70, 12, panel, ModelSettings{}, nullptr, &price);
    for (int j = 0; j < 12; ++j) EXPECT_EQ(a[j].location, b[j].location);

    std::vector<double> path;
    for (const auto& f : price.forecast(70, 12)) path.push_back(f.location);
    const double coef = m.posterior_at(70).m(m.structure().index_of(kLogNetPrice));
    const auto plug = m.forecast_with_price(70, 12, path);
    for (double inc : {0.05, 0.2}) {
        auto up = path;
        for (auto& v : up) v += inc;
        const auto shifted = m.forecast_with_price(70, 12, up);
        for (int j = 0; j < 12; ++j) {
            EXPECT_NEAR(shifted[j].location - plug[j].location, coef * inc, 1e-12);
        }
    }
}

TEST(PairModel, MissingWeeksLeaveStateUntouched) {
    const auto panel = generate_synthetic(small_config(13)).panel;
    PairContext ctx;
    ctx.series = &panel.series().front();
    ctx.discounts = panel.active_discounts("CAT001");
    ctx.missing_weeks = {50, 51};
    PairModel m(ctx, Variant::baseline, ModelSettings{});
    m.run();
    const auto prior = dlm::evolve(m.posterior_at(49), m.structure());
    EXPECT_TRUE(m.posterior_at(50).same_moments(prior));
    EXPECT_FALSE(m.result().std_errors[50].has_value());
}

TEST(PairModel, CrossPredictorAddsRegressor) {
    const auto panel = generate_synthetic(small_config(14)).panel;
    const auto& s = panel.at({"LSG01", "CAT002"});
    PairContext ctx;
    ctx.series = &s;
    ctx.discounts = panel.active_discounts("CAT002");
    ctx.extra = cross_predictor_table(panel, s, {{"CAT002", "CAT001"}});
    PairModel m(ctx, Variant::baseline, ModelSettings{});
    const int idx = m.structure().index_of("x_CAT001_tpr_pct");
    ASSERT_GE(idx, 0);
    const auto& src = panel.at({"LSG01", "CAT001"});
    for (int t = 0; t < 104; t += 17) EXPECT_EQ(m.design()(t, idx), src.tpr_pct[t]);
    m.run();
    const auto fd = m.future_design(60, 3);
    EXPECT_EQ(fd(2, idx), src.tpr_pct[63]);
}

TEST(PairModel, PooledSamplesCentreOnPlugInForBaseline) {
    const auto panel = generate_synthetic(small_config(15)).panel;
    PairContext ctx;
    ctx.series = &panel.series().front();
    ctx.discounts = panel.active_discounts("CAT001");
    PairModel m(ctx, Variant::baseline, ModelSettings{});
    m.run();
    const auto fc = m.forecast(60, 4);
    const auto x = m.pooled_samples(60, 4, 20000, 3);
    EXPECT_EQ(x, m.pooled_samples(60, 4, 20000, 3));
    for (int j = 0; j < 4; ++j) {
        const double sd = fc[j].sd() * std::sqrt(fc[j].dof / (fc[j].dof - 2));
        EXPECT_NEAR(oracle::mean(x[j]), fc[j].location, 4 * sd / std::sqrt(20000.0));
    }
}

TEST(TuneDiscounts, PicksGridMinimum) {
    const auto panel = generate_synthetic(small_config(16)).panel;
    PairContext ctx;
    ctx.series = &panel.series().front();
    ctx.discounts = panel.active_discounts("CAT001");
    const std::vector<double> grid{0.97, 0.99, 1.0};
    const auto best = tune_discounts(ctx, Variant::baseline, ModelSettings{}, grid, grid, 40);
    for (double d : grid) {
        for (double b : grid) {
            ModelSettings s;
            s.delta_regression = d;
            s.beta = b;
            PairModel m(ctx, Variant::baseline, s);
            m.run(40);
            EXPECT_LE(best.mape, m.one_step_mape(8, 40));
        }
    }
}

TEST(RunStudy, OnePairOneVariantCounts) {
    Panel p;
    const auto full = generate_synthetic(small_config(17, 1, 1)).panel;
    p.add(full.series().front());
    auto cfg = fast_study();
    cfg.variants = {Variant::baseline};
    const auto r = run_study(p, cfg);
    EXPECT_EQ(r.records.size(), 52u * 12u);
    EXPECT_EQ(r.first_origin, 40);
    EXPECT_EQ(r.last_origin, 91);
    std::set<int> targets;
    for (const auto& rec : r.records) {
        if (rec.horizon == 12) targets.insert(rec.target_week());
        EXPECT_TRUE(rec.actual.has_value());
        EXPECT_LE(rec.lo90, rec.point_median);
        EXPECT_GE(rec.hi90, rec.point_median);
    }
    EXPECT_EQ(*targets.begin(), 52);
    EXPECT_EQ(*targets.rbegin(), 103);
}

TEST(RunStudy, InsufficientSpanIsConfigError) {
    const auto panel = generate_synthetic(small_config(1, 1, 1, 103)).panel;
    EXPECT_THROW(run_study(panel, fast_study()), ConfigError);
    auto cfg = fast_study();
    cfg.variants.clear();
    EXPECT_THROW(run_study(generate_synthetic(small_config(1, 1, 1)).panel, cfg), ConfigError);
}

TEST(RunStudy, RecordsMatchRefitAtEachOrigin) {
    const auto panel = generate_synthetic(small_config(18, 2, 1)).panel;
    auto cfg = fast_study();
    cfg.variants = {Variant::baseline, Variant::ms};
    const auto r = run_study(panel, cfg);
    const auto effects = fit_aggregate(aggregate_category(panel, "CAT001"), cfg.settings);
    const SeriesKey key{"LSG02", "CAT001"};
    for (auto v : cfg.variants) {
        for (int origin : {40, 77}) {
            const auto fc = forecast_pair(key, v, origin, 12, panel, cfg.settings, &effects);
            for (const auto& rec : r.records) {
                if (rec.key != key || rec.variant != v || rec.origin != origin) continue;
                EXPECT_DOUBLE_EQ(rec.location, fc[rec.horizon - 1].location);
                EXPECT_DOUBLE_EQ(rec.scale, fc[rec.horizon - 1].scale);
            }
        }
    }
}

TEST(RunStudy, NoLookAheadPastOrigin) {
    // Hiding revenue after the origin, in every LSG, must not move that
    // origin's forecasts: aggregate effects and pair states are causal.
    const auto panel = generate_synthetic(small_config(19, 3, 1)).panel;
    const int origin = 60;
    Panel hidden;
    for (auto s : panel.series()) {
        for (int w = origin + 1; w < s.n_weeks(); ++w) s.revenue[w] = 1.0;
        hidden.add(std::move(s));
    }
    ModelSettings settings;
    const auto ea = fit_aggregate(aggregate_category(panel, "CAT001"), settings);
    const auto eb = fit_aggregate(aggregate_category(hidden, "CAT001"), settings);
    for (const auto& key : panel.keys()) {
        const auto fa = forecast_pair(key, Variant::ms, origin, 12, panel, settings, &ea);
        const auto fb = forecast_pair(key, Variant::ms, origin, 12, hidden, settings, &eb);
        for (int j = 0; j < 12; ++j) EXPECT_EQ(fa[j].location, fb[j].location);
    }
}

TEST(RunStudy, PairOrderAndJobsDoNotChangeOutput) {
    const auto panel = generate_synthetic(small_config(20, 3, 2)).panel;
    auto cfg = fast_study();
    cfg.variants = {Variant::baseline};
    cfg.record_horizons = {1, 12};
    cfg.jobs = 1;
    const auto ref = forecasts_csv(run_study(panel, cfg));
    auto keys = panel.keys();
    std::mt19937 rng(4);
    for (int rep = 0; rep < 2; ++rep) {
        std::shuffle(keys.begin(), keys.end(), rng);
        cfg.pairs = keys;
        cfg.jobs = 1 + rep * 2;
        EXPECT_EQ(forecasts_csv(run_study(panel, cfg)), ref);
    }
}

TEST(RunStudy, PairResultsIndependentOfOtherPairs) {
    const auto panel = generate_synthetic(small_config(21, 3, 2)).panel;
    auto cfg = fast_study();
    cfg.variants = {Variant::baseline, Variant::net};
    cfg.record_horizons = {12};
    const auto all = run_study(panel, cfg);
    const SeriesKey key{"LSG03", "CAT002"};
    cfg.pairs = {key};
    const auto one = run_study(panel, cfg);
    std::vector<ForecastRecord> subset;
    for (const auto& r : all.records)
        if (r.key == key) subset.push_back(r);
    std::ostringstream a, b;
    write_forecasts(a, subset);
    write_forecasts(b, one.records);
    EXPECT_EQ(a.str(), b.str());
}

TEST(RunStudy, SeedFixesEverything) {
    const auto panel = generate_synthetic(small_config(22, 2, 2)).panel;
    StudyConfig cfg;
    cfg.delta_grid = {0.98, 1.0};
    cfg.beta_grid = {0.99, 1.0};
    cfg.record_horizons = {1, 12};
    cfg.seed = 5;
    const auto a = run_study(panel, cfg);
    const auto b = run_study(panel, cfg);
    EXPECT_EQ(forecasts_csv(a), forecasts_csv(b));
    cfg.seed = 6;
    const auto c = run_study(panel, cfg);
    ASSERT_EQ(a.records.size(), c.records.size());
    bool any_diff = false;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].location, c.records[i].location);
        any_diff |= a.records[i].point_mape_opt != c.records[i].point_mape_opt;
    }
    EXPECT_TRUE(any_diff);
    EXPECT_EQ(a.tuning.size(), 4u * 4u);
}

TEST(RunStudy, MapeOptimalPointBelowMedian) {
    const auto panel = generate_synthetic(small_config(23, 1, 1)).panel;
    StudyConfig cfg;
    cfg.tune = false;
    cfg.variants = {Variant::baseline};
    cfg.record_horizons = {12};
    for (const auto& r : run_study(panel, cfg).records) EXPECT_LE(r.point_mape_opt, r.point_median * 1.001);
}

TEST(RunStudy, PooledModeProducesOrderedIntervals) {
    const auto panel = generate_synthetic(small_config(24, 2, 1)).panel;
    auto cfg = fast_study();
    cfg.variants = {Variant::ms_net};
    cfg.pooled_draws = 200;
    cfg.record_horizons = {12};
    const auto r = run_study(panel, cfg);
    for (const auto& rec : r.records) {
        EXPECT_LT(rec.lo90, rec.point_median);
        EXPECT_LT(rec.point_median, rec.hi90);
        EXPECT_FALSE(std::isnan(rec.point_mape_opt));
    }
}

TEST(StudyIo, ForecastsRoundTrip) {
    const auto panel = generate_synthetic(small_config(25, 1, 1)).panel;
    auto cfg = fast_study();
    cfg.variants = {Variant::baseline};
    cfg.record_horizons = {3};
    const auto text = forecasts_csv(run_study(panel, cfg));
    std::istringstream in(text);
    const auto back = read_forecasts(in);
    std::ostringstream out;
    write_forecasts(out, back);
    EXPECT_EQ(out.str(), text);
}

TEST(StudyIo, BadTargetWeekRejected) {
    std::istringstream in(std::string(kForecastHeader) + "\n40,L,C,BASELINE,3,44,1,1,5,1,1,0,2,,,\n");
    EXPECT_THROW(read_forecasts(in), InvariantError);
}
