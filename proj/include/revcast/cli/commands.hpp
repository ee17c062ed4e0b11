#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "revcast/cli/config.hpp"
#include "revcast/data/panel_io.hpp"
#include "revcast/data/preprocess.hpp"
#include "revcast/data/synthetic.hpp"
#include "revcast/dlm/trajectory_io.hpp"
#include "revcast/error.hpp"
#include "revcast/eval/compare.hpp"
#include "revcast/eval/crosscat.hpp"
#include "revcast/eval/io.hpp"
#include "revcast/eval/metrics.hpp"
#include "revcast/multiscale/study.hpp"
#include "revcast/multiscale/study_io.hpp"
#include "revcast/parallel.hpp"

namespace revcast::cli {

enum class Command { synth, fit, forecast, evaluate, crosscat };

inline Command parse_command(std::string_view s) {
    if (s == "synth") return Command::synth;
    if (s == "fit") return Command::fit;
    if (s == "forecast") return Command::forecast;
    if (s == "evaluate") return Command::evaluate;
    if (s == "crosscat") return Command::crosscat;
    throw ConfigError("unknown command '" + std::string(s) + "'");
}

namespace detail {

inline std::filesystem::path output_dir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw ConfigError("output directory '" + cfg.output_dir + "' is not writable");
    return dir;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write '" + p.string() + "'");
    return out;
}

inline std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot open '" + p.string() + "'; run the producing command first");
    return in;
}

/// The raw panel: from [input] panel, otherwise generated from [synth].
inline Panel raw_panel(const RunConfig& cfg) {
    if (cfg.panel_path) return parse_panel(*cfg.panel_path);
    if (cfg.synth) return generate_synthetic(*cfg.synth).panel;
    throw ConfigError("config needs [input] panel or a [synth] section");
}

inline Panel model_panel(const RunConfig& cfg) {
    Panel p = raw_panel(cfg);
    if (!cfg.preprocess) return p;
    return preprocess(p, cfg.preprocess_config).panel;
}

inline std::string file_stem(const SeriesKey& k) { return k.lsg_id + "_" + k.category_id; }

}  // namespace detail

/// synth: panel.csv and ground_truth.csv.
inline std::vector<std::filesystem::path> run_synth(const RunConfig& cfg) {
    if (!cfg.synth) throw ConfigError("synth needs a [synth] section");
    const auto dir = detail::output_dir(cfg);
    const auto out = generate_synthetic(*cfg.synth);
    const auto panel_path = dir / "panel.csv";
    const auto truth_path = dir / "ground_truth.csv";
    {
        auto f = detail::open_out(panel_path);
        write_panel(f, out.panel);
    }
    {
        auto f = detail::open_out(truth_path);
        write_ground_truth(f, out.truth);
    }
    return {panel_path, truth_path};
}

/// fit: full-span posterior trajectories for every Category aggregate, price
/// model and pair variant, plus the preprocessing report and effect means.
inline std::vector<std::filesystem::path> run_fit(const RunConfig& cfg) {
    using namespace multiscale;
    const auto dir = detail::output_dir(cfg);
    const auto traj_dir = dir / "trajectories";
    std::filesystem::create_directories(traj_dir);
    Panel panel = detail::raw_panel(cfg);
    PreprocessReport report;
    if (cfg.preprocess) {
        auto r = preprocess(panel, cfg.preprocess_config);
        panel = std::move(r.panel);
        report = std::move(r.report);
    }
    const auto& st = cfg.study;
    const std::vector<int> missing = st.holiday_missing ? st.holiday_weeks : std::vector<int>{};
    std::vector<std::filesystem::path> files;

    const auto cats = panel.categories();
    std::vector<AggregateFit> aggs(cats.size());
    parallel_for(cats.size(), st.jobs, [&](std::size_t i) {
        aggs[i] = fit_aggregate_model(aggregate_category(panel, cats[i]), st.settings, 0, st.seed, missing);
    });
    std::map<std::string, const EffectTrajectory*> effects;
    for (std::size_t i = 0; i < cats.size(); ++i) {
        effects[cats[i]] = &aggs[i].effects;
        const auto p = traj_dir / ("aggregate_" + cats[i] + ".csv");
        auto f = detail::open_out(p);
        dlm::write_trajectory(f, aggs[i].filter.posteriors);
        files.push_back(p);
    }
    {
        const auto p = dir / "effects.csv";
        auto f = detail::open_out(p);
        f << "category_id,week,covariate,mean\n";
        for (std::size_t i = 0; i < cats.size(); ++i) {
            const auto& e = aggs[i].effects;
            for (int w = 0; w < e.n_weeks(); ++w)
                for (std::size_t k = 0; k < e.names.size(); ++k)
                    csv::write_row(f, {cats[i], std::to_string(e.first_week + w), e.names[k],
                                       csv::format_double(e.means[static_cast<std::size_t>(w)](static_cast<Eigen::Index>(k)))});
        }
        files.push_back(p);
    }
    {
        const auto p = dir / "preprocess_report.csv";
        auto f = detail::open_out(p);
        f << "action,category_id,lsg_id,covariate,statistic\n";
        for (const auto& a : report.actions)
            csv::write_row(f, {a.kind == PreprocessAction::Kind::dropped ? "dropped" : "jittered", a.category_id, a.lsg_id,
                               a.covariate, csv::format_double(a.statistic)});
        files.push_back(p);
    }

    const bool need_price = std::any_of(st.variants.begin(), st.variants.end(), uses_net_price);
    const auto& series = panel.series();
    std::vector<std::vector<std::filesystem::path>> written(series.size());
    parallel_for(series.size(), st.jobs, [&](std::size_t i) {
        const auto& s = series[i];
        const auto discounts = panel.active_discounts(s.key.category_id);
        std::unique_ptr<NetPriceModel> price;
        if (need_price) {
            price = std::make_unique<NetPriceModel>(s, discounts, st.settings);
            const auto p = traj_dir / (detail::file_stem(s.key) + "_PRICE.csv");
            auto f = detail::open_out(p);
            dlm::write_trajectory(f, price->filter().posteriors);
            written[i].push_back(p);
        }
        PairContext ctx;
        ctx.series = &s;
        ctx.discounts = discounts;
        ctx.effects = effects.at(s.key.category_id);
        ctx.price = price.get();
        ctx.extra = cross_predictor_table(panel, s, st.cross_predictors);
        ctx.missing_weeks = missing;
        for (const Variant v : st.variants) {
            PairModel model(ctx, v, st.settings);
            model.run();
            const auto p = traj_dir / (detail::file_stem(s.key) + "_" + std::string(to_string(v)) + ".csv");
            auto f = detail::open_out(p);
            dlm::write_trajectory(f, model.result().posteriors);
            written[i].push_back(p);
        }
    });
    for (auto& w : written) files.insert(files.end(), w.begin(), w.end());
    return files;
}

/// forecast: the rolling-origin study as forecasts.csv (+ tuning.csv).
inline std::vector<std::filesystem::path> run_forecast(const RunConfig& cfg) {
    const auto dir = detail::output_dir(cfg);
    const Panel panel = detail::model_panel(cfg);
    const auto result = multiscale::run_study(panel, cfg.study);
    const auto fp = dir / "forecasts.csv";
    const auto tp = dir / "tuning.csv";
    {
        auto f = detail::open_out(fp);
        multiscale::write_forecasts(f, result.records);
    }
    {
        auto f = detail::open_out(tp);
        multiscale::write_tuning(f, result.tuning);
    }
    return {fp, tp};
}

/// evaluate: accuracy.csv for every variant and horizon, and per-variant
/// comparisons against the baseline at the evaluation horizon, with and
/// without holiday masking.
inline std::vector<std::filesystem::path> run_evaluate(const RunConfig& cfg) {
    using namespace multiscale;
    const auto dir = detail::output_dir(cfg);
    auto in = detail::open_in(dir / "forecasts.csv");
    const auto records = read_forecasts(in);
    const auto& ev = cfg.evaluate;
    const std::vector<int> mask = ev.mask_holidays ? cfg.study.holiday_weeks : std::vector<int>{};
    const auto acc = eval::compute_accuracy(records, mask, ev.point);
    if (acc.empty()) throw EmptyEvaluationError("forecasts.csv has no records with observed actuals");

    std::vector<std::filesystem::path> files;
    const auto ap = dir / "accuracy.csv";
    {
        auto f = detail::open_out(ap);
        eval::write_accuracy(f, acc);
    }
    files.push_back(ap);

    const auto base = eval::select(acc, ev.baseline, ev.horizon);
    if (base.empty())
        throw ConfigError("no " + std::string(to_string(ev.baseline)) + " records at horizon " + std::to_string(ev.horizon));
    const auto sp = dir / "comparison_summary.csv";
    auto summary = detail::open_out(sp);
    summary << "variant,baseline,horizon,masked,fraction_improved,n_pairs\n";
    for (const Variant v : cfg.study.variants) {
        if (v == ev.baseline) continue;
        const auto other = eval::select(acc, v, ev.horizon);
        if (other.empty()) throw ConfigError("no " + std::string(to_string(v)) + " records in forecasts.csv");
        for (const bool masked : {false, true}) {
            const auto cmp = eval::compare_models(base, other, masked);
            const auto p = dir / ("compare_" + std::string(to_string(v)) + (masked ? "_masked" : "") + ".csv");
            auto f = detail::open_out(p);
            eval::write_comparison(f, cmp);
            files.push_back(p);
            csv::write_row(summary, {std::string(to_string(v)), std::string(to_string(ev.baseline)),
                                     std::to_string(ev.horizon), std::string(masked ? "true" : "false"),
                                     csv::format_double(cmp.fraction_improved), std::to_string(cmp.rows.size())});
        }
    }
    files.push_back(sp);
    return files;
}

/// crosscat: standardized errors vs TPR% and log revenue vs TPR% matrices
/// over the top-N Categories by revenue.
inline std::vector<std::filesystem::path> run_crosscat(const RunConfig& cfg) {
    const auto dir = detail::output_dir(cfg);
    auto in = detail::open_in(dir / "forecasts.csv");
    const auto records = multiscale::read_forecasts(in);
    const Panel panel = detail::model_panel(cfg);
    const auto& cc = cfg.crosscat;
    const auto errors = eval::standardized_errors(records, cc.variant, cc.horizon);
    if (errors.empty())
        throw ConfigError("forecasts.csv has no " + std::string(multiscale::to_string(cc.variant)) + " records at horizon " +
                          std::to_string(cc.horizon));
    int w0 = std::numeric_limits<int>::max(), w1 = std::numeric_limits<int>::min();
    for (const auto& [k, weeks] : errors) {
        w0 = std::min(w0, weeks.begin()->first);
        w1 = std::max(w1, weeks.rbegin()->first);
    }
    const auto cats = eval::top_categories_by_revenue(panel, cc.top_n);
    const auto tpr = eval::panel_values(panel, "tpr_pct", w0, w1);
    const auto logrev = eval::panel_values(panel, "log_revenue", w0, w1);

    const auto ep = dir / "crosscat_errors.csv";
    const auto rp = dir / "crosscat_revenue.csv";
    {
        auto f = detail::open_out(ep);
        eval::write_matrix(f, eval::cross_category_correlation(errors, tpr, cats));
    }
    {
        auto f = detail::open_out(rp);
        eval::write_matrix(f, eval::cross_category_correlation(logrev, tpr, cats));
    }
    return {ep, rp};
}

inline std::vector<std::filesystem::path> dispatch(Command c, const RunConfig& cfg) {
    switch (c) {
        case Command::synth: return run_synth(cfg);
        case Command::fit: return run_fit(cfg);
        case Command::forecast: return run_forecast(cfg);
        case Command::evaluate: return run_evaluate(cfg);
        case Command::crosscat: return run_crosscat(cfg);
    }
    return {};
}

}  // namespace revcast::cli
