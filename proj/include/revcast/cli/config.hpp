#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "revcast/csv.hpp"
#include "revcast/data/calendar.hpp"
#include "revcast/data/preprocess.hpp"
#include "revcast/data/synthetic.hpp"
#include "revcast/error.hpp"
#include "revcast/eval/metrics.hpp"
#include "revcast/multiscale/study.hpp"

namespace revcast::cli {

struct EvaluateOptions {
    multiscale::Variant baseline = multiscale::Variant::baseline;
    int horizon = 12;
    bool mask_holidays = true;
    eval::PointRule point = eval::PointRule::mape_optimal;
};

struct CrosscatOptions {
    multiscale::Variant variant = multiscale::Variant::ms_net;
    int horizon = 12;
    int top_n = 40;
};

/// Everything a command needs, parsed from an INI-style file.
struct RunConfig {
    std::optional<std::string> panel_path;
    std::optional<SynthConfig> synth;
    bool preprocess = true;
    PreprocessConfig preprocess_config;
    multiscale::StudyConfig study;
    EvaluateOptions evaluate;
    CrosscatOptions crosscat;
    std::string output_dir = "out";
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> list(const std::string& s) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    for (auto part : csv::split(s)) out.push_back(trim(part));
    return out;
}

/// Collects every problem instead of stopping at the first.
class Reader {
public:
    explicit Reader(const boost::property_tree::ptree& tree) : tree_(tree) {}

    void known(const std::string& section, std::set<std::string> keys) { known_[section] = std::move(keys); }
    bool has_section(const std::string& section) const { return tree_.get_child_optional(section).has_value(); }

    std::optional<std::string> raw(const std::string& section, const std::string& key) {
        auto child = tree_.get_child_optional(section);
        if (!child) return std::nullopt;
        auto v = child->get_optional<std::string>(boost::property_tree::ptree::path_type(key, '\0'));
        if (!v) return std::nullopt;
        return trim(*v);
    }

    template <class T>
    void get(const std::string& section, const std::string& key, T& out) {
        auto v = raw(section, key);
        if (!v) return;
        try {
            out = convert<T>(*v);
        } catch (const std::exception& e) {
            problem("[" + section + "] " + key + ": " + e.what());
        }
    }

    void get_list(const std::string& section, const std::string& key, std::vector<double>& out) {
        auto v = raw(section, key);
        if (!v) return;
        out.clear();
        for (const auto& item : list(*v)) {
            try {
                out.push_back(convert<double>(item));
            } catch (const std::exception& e) {
                problem("[" + section + "] " + key + ": " + e.what());
            }
        }
    }

    void get_list(const std::string& section, const std::string& key, std::vector<int>& out) {
        auto v = raw(section, key);
        if (!v) return;
        out.clear();
        for (const auto& item : list(*v)) {
            try {
                out.push_back(convert<int>(item));
            } catch (const std::exception& e) {
                problem("[" + section + "] " + key + ": " + e.what());
            }
        }
    }

    void problem(std::string p) { problems_.push_back(std::move(p)); }

    /// Reports unknown sections and keys, then throws if anything failed.
    void finish() {
        for (const auto& [section, child] : tree_) {
            auto it = known_.find(section);
            if (it == known_.end()) {
                problem("unknown section [" + section + "]");
                continue;
            }
            for (const auto& [key, _] : child)
                if (!it->second.contains(key)) problem("[" + section + "] unknown key '" + key + "'");
        }
        if (problems_.empty()) return;
        std::string msg;
        for (std::size_t i = 0; i < problems_.size(); ++i) msg += (i ? "\n" : "") + problems_[i];
        throw ConfigError(msg);
    }

    template <class T>
    static T convert(const std::string& s) {
        if constexpr (std::is_same_v<T, std::string>) {
            return s;
        } else if constexpr (std::is_same_v<T, bool>) {
            if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
            if (s == "false" || s == "0" || s == "no" || s == "off") return false;
            throw ConfigError("expected a boolean, got '" + s + "'");
        } else if constexpr (std::is_floating_point_v<T>) {
            auto v = csv::try_parse_double(s);
            if (!v) throw ConfigError("expected a number, got '" + s + "'");
            return static_cast<T>(*v);
        } else {
            long long v = 0;
            auto r = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
                throw ConfigError("expected an integer, got '" + s + "'");
            return static_cast<T>(v);
        }
    }

private:
    const boost::property_tree::ptree& tree_;
    std::map<std::string, std::set<std::string>> known_;
    std::vector<std::string> problems_;
};

inline int category_index(const std::string& id, int n_category) {
    for (int c = 0; c < n_category; ++c)
        if (synth_category_id(c) == id) return c;
    throw ConfigError("unknown synthetic category '" + id + "'");
}

}  // namespace detail

/// Parses a config from text. Every problem found is reported, one per line.
inline RunConfig parse_config(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
    }
    detail::Reader rd(tree);
    rd.known("input", {"panel"});
    rd.known("synth", {"n_lsg", "n_category", "n_weeks", "lsg_scales", "noise_sd", "seasonal_amplitude", "effect_variation",
                       "regime_switch_prob", "zero_regime_prob", "lsg_discount_perturbation", "price_elasticity",
                       "holidays", "cross_effects", "seed"});
    rd.known("preprocess", {"enabled", "negligible_threshold", "jitter_trigger", "jitter_sd", "seed"});
    rd.known("model", {"delta_trend", "delta_harmonic", "delta_regression", "beta", "period", "prior_c0", "prior_n0",
                       "multiscale_prior_mean"});
    rd.known("study", {"variants", "horizon", "burn_in", "tune", "delta_grid", "beta_grid", "mc_samples", "pooled_draws",
                       "seed", "holiday_weeks", "holiday_dates", "holiday_missing", "cross_predictors", "record_horizons",
                       "jobs"});
    rd.known("calendar", {"start_date"});
    rd.known("evaluate", {"baseline", "horizon", "mask_holidays", "point"});
    rd.known("crosscat", {"variant", "horizon", "top_n"});
    rd.known("output", {"dir"});

    RunConfig cfg;
    if (auto p = rd.raw("input", "panel")) cfg.panel_path = *p;

    if (rd.has_section("synth")) {
        SynthConfig s;
        rd.get("synth", "n_lsg", s.n_lsg);
        rd.get("synth", "n_category", s.n_category);
        rd.get("synth", "n_weeks", s.n_weeks);
        rd.get_list("synth", "lsg_scales", s.lsg_scales);
        rd.get_list("synth", "noise_sd", s.noise_sd);
        rd.get("synth", "seasonal_amplitude", s.seasonal_amplitude);
        rd.get("synth", "effect_variation", s.effect_variation);
        rd.get("synth", "regime_switch_prob", s.regime_switch_prob);
        rd.get("synth", "zero_regime_prob", s.zero_regime_prob);
        rd.get("synth", "lsg_discount_perturbation", s.lsg_discount_perturbation);
        rd.get("synth", "price_elasticity", s.price_elasticity);
        rd.get("synth", "seed", s.seed);
        // holidays = week:multiplier, ...
        if (auto v = rd.raw("synth", "holidays")) {
            for (const auto& item : detail::list(*v)) {
                const auto colon = item.find(':');
                try {
                    if (colon == std::string::npos) throw ConfigError("expected week:multiplier, got '" + item + "'");
                    s.holidays.push_back({detail::Reader::convert<int>(item.substr(0, colon)),
                                          detail::Reader::convert<double>(item.substr(colon + 1))});
                } catch (const std::exception& e) {
                    rd.problem(std::string("[synth] holidays: ") + e.what());
                }
            }
        }
        // cross_effects = SOURCE:TARGET:coefficient, ...
        if (auto v = rd.raw("synth", "cross_effects")) {
            for (const auto& item : detail::list(*v)) {
                try {
                    const auto a = item.find(':');
                    const auto b = a == std::string::npos ? a : item.find(':', a + 1);
                    if (b == std::string::npos) throw ConfigError("expected SOURCE:TARGET:coefficient, got '" + item + "'");
                    s.cross_effects.push_back({detail::category_index(item.substr(0, a), s.n_category),
                                               detail::category_index(item.substr(a + 1, b - a - 1), s.n_category),
                                               detail::Reader::convert<double>(item.substr(b + 1))});
                } catch (const std::exception& e) {
                    rd.problem(std::string("[synth] cross_effects: ") + e.what());
                }
            }
        }
        try {
            s.validate();
        } catch (const ConfigError& e) {
            rd.problem(std::string("[synth] ") + e.what());
        }
        cfg.synth = s;
    }

    rd.get("preprocess", "enabled", cfg.preprocess);
    rd.get("preprocess", "negligible_threshold", cfg.preprocess_config.negligible_threshold);
    rd.get("preprocess", "jitter_trigger", cfg.preprocess_config.jitter_trigger);
    rd.get("preprocess", "jitter_sd", cfg.preprocess_config.jitter_sd);
    rd.get("preprocess", "seed", cfg.preprocess_config.seed);

    auto& st = cfg.study;
    auto& m = st.settings;
    rd.get("model", "delta_trend", m.delta_trend);
    rd.get("model", "delta_harmonic", m.delta_harmonic);
    rd.get("model", "delta_regression", m.delta_regression);
    rd.get("model", "beta", m.beta);
    rd.get("model", "period", m.period);
    rd.get("model", "prior_c0", m.prior.c0);
    rd.get("model", "prior_n0", m.prior.n0);
    rd.get("model", "multiscale_prior_mean", m.multiscale_prior_mean);
    for (double d : {m.delta_trend, m.delta_harmonic, m.delta_regression, m.beta})
        if (!(d > 0.0 && d <= 1.0)) rd.problem("[model] discount factors must lie in (0, 1]");
    if (m.period < 2) rd.problem("[model] period must be >= 2");

    if (auto v = rd.raw("study", "variants")) {
        st.variants.clear();
        for (const auto& name : detail::list(*v)) {
            try {
                st.variants.push_back(multiscale::parse_variant(name));
            } catch (const ConfigError& e) {
                rd.problem(std::string("[study] variants: ") + e.what());
            }
        }
    }
    rd.get("study", "horizon", st.horizon);
    rd.get("study", "burn_in", st.burn_in);
    rd.get("study", "tune", st.tune);
    rd.get_list("study", "delta_grid", st.delta_grid);
    rd.get_list("study", "beta_grid", st.beta_grid);
    rd.get("study", "mc_samples", st.mc_samples);
    rd.get("study", "pooled_draws", st.pooled_draws);
    rd.get("study", "seed", st.seed);
    rd.get_list("study", "holiday_weeks", st.holiday_weeks);
    rd.get("study", "holiday_missing", st.holiday_missing);
    rd.get_list("study", "record_horizons", st.record_horizons);
    rd.get("study", "jobs", st.jobs);
    if (auto v = rd.raw("study", "holiday_dates")) {
        auto start = rd.raw("calendar", "start_date");
        if (!start) {
            rd.problem("[study] holiday_dates needs [calendar] start_date");
        } else {
            try {
                const WeekCalendar cal(parse_date(*start));
                for (int w : weeks_of(cal, detail::list(*v))) st.holiday_weeks.push_back(w);
            } catch (const ConfigError& e) {
                rd.problem(std::string("[study] holiday_dates: ") + e.what());
            }
        }
    }
    std::sort(st.holiday_weeks.begin(), st.holiday_weeks.end());
    st.holiday_weeks.erase(std::unique(st.holiday_weeks.begin(), st.holiday_weeks.end()), st.holiday_weeks.end());
    // cross_predictors = TARGET:SOURCE, ...
    if (auto v = rd.raw("study", "cross_predictors")) {
        for (const auto& item : detail::list(*v)) {
            const auto colon = item.find(':');
            if (colon == std::string::npos || colon == 0 || colon + 1 == item.size())
                rd.problem("[study] cross_predictors: expected TARGET:SOURCE, got '" + item + "'");
            else
                st.cross_predictors.push_back({item.substr(0, colon), item.substr(colon + 1), "tpr_pct"});
        }
    }
    try {
        st.validate();
    } catch (const ConfigError& e) {
        rd.problem(std::string("[study] ") + e.what());
    }

    if (auto v = rd.raw("evaluate", "baseline")) {
        try {
            cfg.evaluate.baseline = multiscale::parse_variant(*v);
        } catch (const ConfigError& e) {
            rd.problem(std::string("[evaluate] baseline: ") + e.what());
        }
    }
    rd.get("evaluate", "horizon", cfg.evaluate.horizon);
    rd.get("evaluate", "mask_holidays", cfg.evaluate.mask_holidays);
    if (auto v = rd.raw("evaluate", "point")) {
        if (*v == "mape_optimal") cfg.evaluate.point = eval::PointRule::mape_optimal;
        else if (*v == "median") cfg.evaluate.point = eval::PointRule::median;
        else rd.problem("[evaluate] point: expected mape_optimal or median, got '" + *v + "'");
    }
    if (cfg.evaluate.horizon < 1 || cfg.evaluate.horizon > st.horizon)
        rd.problem("[evaluate] horizon must lie in 1.." + std::to_string(st.horizon));

    if (auto v = rd.raw("crosscat", "variant")) {
        try {
            cfg.crosscat.variant = multiscale::parse_variant(*v);
        } catch (const ConfigError& e) {
            rd.problem(std::string("[crosscat] variant: ") + e.what());
        }
    }
    rd.get("crosscat", "horizon", cfg.crosscat.horizon);
    rd.get("crosscat", "top_n", cfg.crosscat.top_n);
    if (cfg.crosscat.top_n < 1) rd.problem("[crosscat] top_n must be >= 1");
    if (cfg.crosscat.horizon < 1 || cfg.crosscat.horizon > st.horizon)
        rd.problem("[crosscat] horizon must lie in 1.." + std::to_string(st.horizon));

    if (auto v = rd.raw("output", "dir")) cfg.output_dir = *v;
    if (cfg.output_dir.empty()) rd.problem("[output] dir is empty");

    rd.finish();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse_config(in);
}

}  // namespace revcast::cli
