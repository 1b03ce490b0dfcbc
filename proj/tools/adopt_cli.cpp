#include <CLI11.hpp>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "adopt/core.hpp"
#include "adopt/csv.hpp"
#include "adopt/diagnostics.hpp"
#include "adopt/gbm_lattice.hpp"
#include "adopt/market_sim.hpp"
#include "adopt/mc.hpp"
#include "adopt/series.hpp"
#include "adopt/sv_lattice.hpp"
#include "json_config.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr std::uint64_t kDefaultSeed = 20130207;

/// Bad flags or parameter values; reported with exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs a parameter check, turning its complaint into a usage error.
template <class F>
void check_usage(F&& check) {
    try {
        check();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    } catch (const std::domain_error& e) {
        throw UsageError(e.what());
    }
}

// Rounded to the 12 significant digits used for all numeric output.
ordered_json num(double value) {
    if (!std::isfinite(value)) return nullptr;
    return std::stod(adopt::format_number(value));
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path);
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

void add_config(CLI::App* app) {
    app->add_option("--config", "JSON file with option values (flags override it)");
}

// Feeds a subcommand's --config file to every option not given on the
// command line, running the option's validators as if it had been typed.
void apply_json_config(CLI::App* app) {
    const auto* config = app->get_option("--config");
    if (config->count() == 0) return;
    const auto path = config->as<std::string>();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("file not found: " + path);
    std::vector<CLI::ConfigItem> items;
    try {
        items = read_json_config(in);
    } catch (const CLI::Error& e) {
        throw UsageError(path + ": " + e.what());
    }
    for (const auto& item : items) {
        auto* opt = app->get_option_no_throw("--" + item.name);
        if (opt == nullptr || item.name == "config")
            throw UsageError(path + ": unknown option '" + item.name + "'");
        if (opt->count() > 0) continue;
        try {
            for (const auto& value : item.inputs) opt->add_result(value);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw UsageError(path + ": " + e.what());
        }
    }
}

struct ContractArgs {
    double strike = 0.005;
    std::string basis = "per-click";
    double ctr = 0.03;
    double rate = 0.05;
    double expiry = 31.0 / 365.0;
    int steps = 100;

    void attach(CLI::App* app) {
        app->add_option("--strike", strike, "Strike price")->capture_default_str();
        app->add_option("--basis", basis, "Strike quote basis: per-click (cpc) or per-mille (cpm)")
            ->capture_default_str();
        app->add_option("--ctr", ctr, "Click-through rate")->capture_default_str();
        app->add_option("--rate", rate, "Continuous risk-free rate")->capture_default_str();
        app->add_option("--expiry", expiry, "Time to expiry in years")->capture_default_str();
        app->add_option("--steps", steps, "Lattice / time steps")->capture_default_str();
    }

    adopt::OptionContract build() const {
        adopt::OptionContract c;
        check_usage([&] {
            c.strike = strike;
            c.strike_basis = adopt::parse_strike_basis(basis);
            c.ctr = ctr;
            c.rate = rate;
            c.expiry = expiry;
            c.steps = steps;
            c.validate();
        });
        return c;
    }

    ordered_json echo() const {
        return {{"strike", num(strike)}, {"strike_basis", basis}, {"ctr", num(ctr)},
                {"rate", num(rate)},     {"expiry", num(expiry)}, {"steps", steps}};
    }
};

struct SvArgs {
    double spot = 2.0;
    double sigma0 = 0.5;
    double kappa = 3.0;
    double theta = 0.75;
    double delta = 0.35;

    void attach(CLI::App* app) {
        app->add_option("--sigma0", sigma0, "Initial volatility")->capture_default_str();
        app->add_option("--kappa", kappa, "Mean-reversion speed")->capture_default_str();
        app->add_option("--theta", theta, "Long-run volatility")->capture_default_str();
        app->add_option("--delta", delta, "Volatility of volatility")->capture_default_str();
    }

    adopt::SvParams build() const {
        adopt::SvParams p{spot, sigma0, kappa, theta, delta};
        check_usage([&] { p.validate(); });
        return p;
    }

    ordered_json echo() const {
        return {{"spot", num(spot)},   {"sigma0", num(sigma0)}, {"kappa", num(kappa)},
                {"theta", num(theta)}, {"delta", num(delta)}};
    }
};

struct McArgs {
    std::int64_t paths = 100000;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 0;

    void attach(CLI::App* app) {
        app->add_option("--paths", paths, "Monte Carlo paths")->capture_default_str();
        app->add_option("--seed", seed, "Random seed")->capture_default_str();
        app->add_option("--threads", threads, "Worker threads (0: all cores)")->capture_default_str();
    }

    adopt::McConfig build(adopt::McScheme scheme) const {
        adopt::McConfig config;
        config.scheme = scheme;
        config.paths = paths;
        config.seed = seed;
        config.threads = threads;
        check_usage([&] { config.validate(); });
        return config;
    }
};

ordered_json mc_json(const adopt::McResult& r) {
    return {{"price", num(r.price)},     {"std_error", num(r.std_error)}, {"ci_low", num(r.ci_low)},
            {"ci_high", num(r.ci_high)}, {"paths", r.paths},              {"scheme", adopt::scheme_name(r.scheme)}};
}

// ---------------------------------------------------------------- price

struct PriceCmd {
    std::string method = "closed";
    double spot = 2.0;
    double sigma = 0.5;
    double stretch = adopt::kDefaultStretch;
    std::string format = "json";
    std::string output;
    ContractArgs contract;
    SvArgs sv;
    McArgs mc;

    static constexpr std::array kMethods = {"closed",   "crr",       "tian-bin",  "haahtela",
                                            "boyle-trin", "kr-trin", "tian-trin", "sv-lattice",
                                            "mc-euler", "mc-milstein"};

    void attach(CLI::App* app) {
        app->add_option("--method", method, "Pricer")
            ->check(CLI::IsMember(std::vector<std::string>(kMethods.begin(), kMethods.end())))
            ->capture_default_str();
        app->add_option("--spot", spot, "Current CPM")->capture_default_str();
        app->add_option("--sigma", sigma, "Constant volatility (GBM pricers)")->capture_default_str();
        app->add_option("--stretch", stretch, "Trinomial stretch lambda (boyle-trin, kr-trin)")
            ->capture_default_str();
        contract.attach(app);
        sv.attach(app);
        mc.attach(app);
        app->add_option("--format", format, "Report format")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
        app->add_option("-o,--output", output, "Report file (default: stdout)");
        add_config(app);
    }

    int run() {
        const auto c = contract.build();
        sv.spot = spot;
        ordered_json report;
        report["command"] = "price";
        report["method"] = method;
        ordered_json inputs = contract.echo();
        inputs["spot"] = num(spot);
        std::optional<adopt::McResult> mc_result;
        double price = 0.0;

        if (method == "sv-lattice" || method.starts_with("mc-")) {
            const auto params = sv.build();
            const auto sv_echo = sv.echo();
            for (const auto& [k, v] : sv_echo.items()) inputs[k] = v;
            if (method == "sv-lattice") {
                price = adopt::price_sv_option(adopt::build_censored_lattice(params, c)).price;
            } else {
                const auto scheme = method == "mc-euler" ? adopt::McScheme::Euler : adopt::McScheme::Milstein;
                mc_result = adopt::mc_price(params, c, mc.build(scheme));
                price = mc_result->price;
                inputs["seed"] = mc.seed;
            }
        } else {
            adopt::GbmParams gbm{spot, sigma, 0.0};
            check_usage([&] { gbm.validate(); });
            inputs["sigma"] = num(sigma);
            if (method == "closed") {
                price = adopt::closed_form_price(gbm, c);
            } else {
                adopt::LatticeSpec spec;
                check_usage([&] { spec.method = adopt::parse_lattice_method(method); });
                spec.stretch = stretch;
                if (adopt::is_trinomial(spec.method)) inputs["stretch"] = num(stretch);
                price = adopt::lattice_price(gbm, c, spec);
            }
        }

        if (format == "csv") {
            std::ostringstream out;
            out << "method,price,std_error,ci_low,ci_high\n" << method << ',' << adopt::format_number(price);
            if (mc_result)
                out << ',' << adopt::format_number(mc_result->std_error) << ','
                    << adopt::format_number(mc_result->ci_low) << ',' << adopt::format_number(mc_result->ci_high);
            else
                out << ",,,";
            out << '\n';
            write_text(output, out.str());
            return kExitOk;
        }
        report["inputs"] = inputs;
        report["price"] = num(price);
        if (mc_result) report["mc"] = mc_json(*mc_result);
        write_text(output, report.dump(2) + "\n");
        return kExitOk;
    }
};

// ---------------------------------------------------------------- converge

struct ConvergeCmd {
    std::vector<std::string> methods;
    std::vector<int> steps{10, 100, 1000};
    double spot = 2.0;
    double sigma = 0.5;
    double stretch = adopt::kDefaultStretch;
    std::string output;
    ContractArgs contract;

    void attach(CLI::App* app) {
        app->add_option("--methods", methods, "Lattice methods, comma separated (default: all six)")
            ->delimiter(',');
        app->add_option("--n", steps, "Step counts, comma separated, ascending")
            ->delimiter(',')
            ->capture_default_str();
        app->add_option("--spot", spot, "Current CPM")->capture_default_str();
        app->add_option("--sigma", sigma, "Volatility")->capture_default_str();
        app->add_option("--stretch", stretch, "Trinomial stretch lambda")->capture_default_str();
        contract.attach(app);
        app->add_option("-o,--output", output, "CSV file (default: stdout)");
        add_config(app);
    }

    int run(const CLI::App& app) {
        std::vector<adopt::LatticeSpec> specs;
        if (app.count("--methods") == 0) {
            for (auto m : adopt::kAllLatticeMethods) specs.push_back({m, stretch});
        } else {
            for (const auto& name : methods) {
                if (name.empty()) continue;
                adopt::LatticeSpec spec;
                check_usage([&] { spec.method = adopt::parse_lattice_method(name); });
                spec.stretch = stretch;
                specs.push_back(spec);
            }
        }
        if (specs.empty()) throw UsageError("empty method list");
        if (steps.empty()) throw UsageError("empty step list");
        const auto c = contract.build();
        adopt::GbmParams gbm{spot, sigma, 0.0};
        check_usage([&] { gbm.validate(); });
        std::vector<adopt::ConvergenceRow> rows;
        check_usage([&] { rows = adopt::convergence_report(gbm, c, specs, steps); });
        std::ostringstream out;
        adopt::write_convergence_csv(out, rows);
        write_text(output, out.str());
        for (const auto& row : rows)
            if (!row.error.empty()) {
                std::cerr << "warning: " << adopt::method_name(row.method) << " n=" << row.steps << ": "
                          << row.error << '\n';
            }
        return kExitOk;
    }
};

// ---------------------------------------------------------------- diagnose

ordered_json verdict_json(const adopt::GbmVerdict& v) {
    ordered_json acf = ordered_json::array();
    for (const auto& p : v.acf) acf.push_back({{"lag", p.lag}, {"value", num(p.value)}, {"band", num(p.band)}});
    return {{"shapiro_w", num(v.shapiro_w)}, {"shapiro_p", num(v.shapiro_p)},
            {"ljung_q", num(v.ljung_q)},     {"ljung_p", num(v.ljung_p)},
            {"ljung_lags", v.ljung_lags},    {"alpha", num(v.alpha)},
            {"is_gbm", v.is_gbm},            {"acf", acf}};
}

struct DiagnoseCmd {
    std::string input;
    std::string out_dir = ".";
    double alpha = 0.05;
    int lags = 0;
    int acf_lags = 10;
    int bins = 10;

    void attach(CLI::App* app) {
        app->add_option("-i,--input", input, "Price series CSV (date,price)");
        app->add_option("--out-dir", out_dir, "Directory for verdict.json, acf.csv, qq.csv, hist.csv")
            ->capture_default_str();
        app->add_option("--alpha", alpha, "Significance level")->capture_default_str();
        app->add_option("--lags", lags, "Ljung-Box lags (0: min(10, n/5))")->capture_default_str();
        app->add_option("--acf-lags", acf_lags, "ACF lags reported")->capture_default_str();
        app->add_option("--bins", bins, "Histogram bins")->capture_default_str();
        add_config(app);
    }

    int run() {
        if (input.empty()) throw UsageError("--input is required");
        if (!(alpha > 0.0 && alpha <= 0.5)) throw UsageError("alpha must lie in (0, 0.5]");
        if (bins < 1) throw UsageError("bins must be >= 1");
        if (acf_lags < 0) throw UsageError("acf-lags must be >= 0");
        const auto series = adopt::read_price_series_file(input);
        series.validate();
        const auto ratios = adopt::log_ratios(series);
        const auto verdict = adopt::gbm_test(series, alpha, lags, acf_lags);

        ensure_dir(out_dir);
        std::ostringstream acf_csv, qq_csv, hist_csv;
        acf_csv << "lag,acf,band\n";
        for (const auto& p : verdict.acf)
            acf_csv << p.lag << ',' << adopt::format_number(p.value) << ',' << adopt::format_number(p.band) << '\n';
        qq_csv << "theoretical,sample\n";
        for (const auto& p : adopt::qq_pairs(ratios))
            qq_csv << adopt::format_number(p.theoretical) << ',' << adopt::format_number(p.sample) << '\n';
        hist_csv << "low,high,count\n";
        for (const auto& b : adopt::histogram(ratios, bins))
            hist_csv << adopt::format_number(b.low) << ',' << adopt::format_number(b.high) << ',' << b.count << '\n';

        ordered_json report;
        report["command"] = "diagnose";
        report["input"] = input;
        report["observations"] = series.size();
        report["dt"] = num(series.dt);
        report["verdict"] = verdict_json(verdict);
        const auto text = report.dump(2) + "\n";
        write_text(join_path(out_dir, "acf.csv"), acf_csv.str());
        write_text(join_path(out_dir, "qq.csv"), qq_csv.str());
        write_text(join_path(out_dir, "hist.csv"), hist_csv.str());
        write_text(join_path(out_dir, "verdict.json"), text);
        std::cout << text;
        return kExitOk;
    }
};

// ---------------------------------------------------------------- estimate

struct EstimateCmd {
    std::string input;
    std::string model = "both";
    int window = adopt::kDefaultVolWindow;
    std::string output;

    void attach(CLI::App* app) {
        app->add_option("-i,--input", input, "Training series CSV (date,price)");
        app->add_option("--model", model, "Model to estimate")
            ->check(CLI::IsMember({"gbm", "sv", "both"}))
            ->capture_default_str();
        app->add_option("--window", window, "Realized-volatility window (SV)")->capture_default_str();
        app->add_option("-o,--output", output, "JSON file (default: stdout)");
        add_config(app);
    }

    int run() {
        if (input.empty()) throw UsageError("--input is required");
        if (window < 5) throw UsageError("window must be >= 5");
        const auto series = adopt::read_price_series_file(input);
        ordered_json report;
        report["command"] = "estimate";
        report["input"] = input;
        report["observations"] = series.size();
        report["dt"] = num(series.dt);
        if (model != "sv") {
            const auto g = adopt::estimate_gbm(series);
            report["gbm"] = {{"spot", num(g.spot)}, {"sigma", num(g.sigma)}, {"mu", num(g.mu)}};
        }
        if (model != "gbm") {
            const auto s = adopt::estimate_sv(series, window);
            report["sv"] = {{"spot", num(s.spot)},   {"sigma0", num(s.sigma0)}, {"kappa", num(s.kappa)},
                            {"theta", num(s.theta)}, {"delta", num(s.delta)},   {"window", window}};
        }
        write_text(output, report.dump(2) + "\n");
        return kExitOk;
    }
};

// ---------------------------------------------------------------- validate

struct ValidateCmd {
    std::string param = "kappa";
    std::optional<double> from;
    std::optional<double> to;
    int points = 5;
    std::string scheme = "both";
    double spot = 20.0;
    std::string output;
    ContractArgs contract;
    SvArgs sv;
    McArgs mc;

    ValidateCmd() {
        contract.strike = 0.633;
        contract.steps = 200;
    }

    void attach(CLI::App* app) {
        app->add_option("--param", param, "Swept parameter")
            ->check(CLI::IsMember({"sigma0", "kappa", "theta", "delta"}))
            ->capture_default_str();
        app->add_option("--from", from, "Sweep start (default depends on the parameter)");
        app->add_option("--to", to, "Sweep end (default depends on the parameter)");
        app->add_option("--points", points, "Grid points, evenly spaced")->capture_default_str();
        app->add_option("--scheme", scheme, "Monte Carlo scheme(s)")
            ->check(CLI::IsMember({"euler", "milstein", "both"}))
            ->capture_default_str();
        app->add_option("--spot", spot, "Current CPM")->capture_default_str();
        contract.attach(app);
        sv.attach(app);
        mc.attach(app);
        app->add_option("-o,--output", output, "CSV file (default: stdout)");
        add_config(app);
    }

    int run() {
        static const std::map<std::string, std::pair<double, double>> default_range = {
            {"sigma0", {0.3, 0.7}}, {"kappa", {1.0, 6.0}}, {"theta", {0.4, 1.1}}, {"delta", {0.1, 0.7}}};
        if (points < 1) throw UsageError("points must be >= 1");
        const double lo = from.value_or(default_range.at(param).first);
        const double hi = to.value_or(default_range.at(param).second);
        if (!(hi >= lo)) throw UsageError("--to must not be below --from");
        std::vector<double> values;
        for (int i = 0; i < points; ++i)
            values.push_back(points == 1 ? lo : lo + (hi - lo) * i / (points - 1));

        const auto c = contract.build();
        sv.spot = spot;
        const auto base = sv.build();
        for (double v : values) check_usage([&] { adopt::with_parameter(base, param, v).validate(); });

        std::vector<adopt::McScheme> schemes;
        if (scheme != "milstein") schemes.push_back(adopt::McScheme::Euler);
        if (scheme != "euler") schemes.push_back(adopt::McScheme::Milstein);
        std::vector<adopt::SweepRow> rows;
        for (auto s : schemes) {
            auto part = adopt::validation_sweep(base, c, mc.build(s), param, values);
            rows.insert(rows.end(), part.begin(), part.end());
        }
        std::ostringstream out;
        adopt::write_sweep_csv(out, rows);
        write_text(output, out.str());
        std::size_t contained = 0;
        for (const auto& r : rows) contained += r.verdict == adopt::Verdict::Contained;
        std::cerr << contained << '/' << rows.size() << " grid points contained\n";
        return contained == rows.size() ? kExitOk : kExitFailure;
    }
};

// ---------------------------------------------------------------- simulate

struct SimulateCmd {
    std::string market;
    std::string model = "sv";
    double drift = 0.0;
    int days = 7;
    std::int64_t supply = 8000;
    double reserve = 0.0;
    std::string start = "2013-02-08";
    std::optional<double> spot;
    double budget = 5.0;
    std::optional<double> strike;
    std::optional<double> option_price;
    std::string pricer = "sv-lattice";
    int pricer_steps = 50;
    int clicks_per_option = 1;
    double sell_ratio = 0.0;
    double ctr = 0.03;
    double rate = 0.05;
    std::uint64_t seed = kDefaultSeed;
    std::string out_dir = ".";
    SvArgs sv;

    void attach(CLI::App* app) {
        app->add_option("--market", market, "Market CSV (date,avg_cpm,supply); omit for a synthetic market");
        app->add_option("--model", model, "Synthetic market model and option pricer family")
            ->check(CLI::IsMember({"gbm", "sv"}))
            ->capture_default_str();
        app->add_option("--drift", drift, "Synthetic annual CPM drift (> 0 bull, < 0 bear)")->capture_default_str();
        app->add_option("--days", days, "Synthetic delivery days")->capture_default_str();
        app->add_option("--supply", supply, "Synthetic daily impressions")->capture_default_str();
        app->add_option("--reserve", reserve, "Synthetic reserve CPM (0: none)")->capture_default_str();
        app->add_option("--start", start, "First synthetic delivery date")->capture_default_str();
        app->add_option("--spot", spot, "CPM on the pricing date (default: 2 synthetic, first day from file)");
        sv.attach(app);
        app->add_option("--budget", budget, "Advertiser daily budget")->capture_default_str();
        app->add_option("--strike", strike, "Strike per click (default: at the money)");
        app->add_option("--option-price", option_price, "Premium per option (default: priced)");
        app->add_option("--pricer", pricer, "Pricer used when --option-price is absent")
            ->check(CLI::IsMember({"sv-lattice", "closed"}))
            ->capture_default_str();
        app->add_option("--pricer-steps", pricer_steps, "Lattice steps per priced expiry")->capture_default_str();
        app->add_option("--clicks-per-option", clicks_per_option, "Clicks covered by one option")
            ->capture_default_str();
        app->add_option("--sell-ratio", sell_ratio, "Publisher's pre-sold share of daily clicks")
            ->capture_default_str();
        app->add_option("--ctr", ctr, "Click-through rate")->capture_default_str();
        app->add_option("--rate", rate, "Continuous risk-free rate")->capture_default_str();
        app->add_option("--seed", seed, "Random seed for the synthetic market")->capture_default_str();
        app->add_option("--out-dir", out_dir, "Directory for market.csv, rtb.csv, options.csv, revenue.csv")
            ->capture_default_str();
        add_config(app);
    }

    // Mean premium of the options expiring on each delivery day.
    double price_options(const adopt::SvParams& params, double strike_cpc, double dt) const {
        double total = 0.0;
        for (int i = 1; i <= days; ++i) {
            adopt::OptionContract c;
            c.strike = strike_cpc;
            c.ctr = ctr;
            c.rate = rate;
            c.expiry = i * dt;
            c.steps = pricer_steps;
            check_usage([&] { c.validate(); });
            if (pricer == "closed" || model == "gbm") {
                total += adopt::closed_form_price({params.spot, params.sigma0, 0.0}, c);
            } else {
                total += adopt::price_sv_option(adopt::build_censored_lattice(params, c)).price;
            }
        }
        return total / days;
    }

    int run() {
        if (!(budget >= 0.0)) throw UsageError("budget must be >= 0");
        if (!(sell_ratio >= 0.0 && sell_ratio <= 1.0)) throw UsageError("sell-ratio must lie in [0, 1]");
        if (!(ctr > 0.0 && ctr <= 1.0)) throw UsageError("ctr must lie in (0, 1]");
        if (clicks_per_option < 1) throw UsageError("clicks-per-option must be >= 1");
        if (pricer_steps < 1) throw UsageError("pricer-steps must be >= 1");

        std::vector<adopt::MarketDay> path;
        sv.spot = spot.value_or(2.0);
        double dt = 1.0 / 365.0;
        if (market.empty()) {
            adopt::SyntheticMarket spec;
            check_usage([&] {
                spec.model = adopt::parse_synthetic_model(model);
                spec.params = sv.build();
                spec.drift = drift;
                spec.days = days;
                spec.supply = supply;
                spec.reserve_price = reserve;
                spec.start = adopt::parse_date(start);
                spec.seed = seed;
                spec.validate();
            });
            dt = spec.dt;
            path = adopt::generate_market(spec);
        } else {
            path = adopt::read_market_file(market);
            if (path.empty()) throw std::runtime_error("market file has no rows: " + market);
            if (!spot) sv.spot = path.front().avg_cpm;
            days = static_cast<int>(path.size());
        }
        const auto params = sv.build();
        const double strike_cpc = strike.value_or(adopt::per_click_value(params.spot, ctr));
        if (!(strike_cpc >= 0.0)) throw UsageError("strike must be >= 0");
        const double premium = option_price ? *option_price : price_options(params, strike_cpc, dt);
        const adopt::OptionTerms terms{premium, strike_cpc, clicks_per_option};
        check_usage([&] { terms.validate(); });

        const auto rtb = adopt::simulate_rtb(budget, path, ctr);
        const auto opt = adopt::simulate_options(budget, path, ctr, terms);
        const auto revenue = adopt::revenue_analysis(path, ctr, sell_ratio, terms);
        const auto baseline = adopt::revenue_analysis(path, ctr, 0.0, terms);

        ensure_dir(out_dir);
        std::ostringstream market_csv, rtb_csv, options_csv, revenue_csv;
        adopt::write_market(market_csv, path);
        adopt::write_ledger_csv(rtb_csv, rtb);
        adopt::write_ledger_csv(options_csv, opt);
        adopt::write_revenue_csv(revenue_csv, revenue);
        write_text(join_path(out_dir, "market.csv"), market_csv.str());
        write_text(join_path(out_dir, "rtb.csv"), rtb_csv.str());
        write_text(join_path(out_dir, "options.csv"), options_csv.str());
        write_text(join_path(out_dir, "revenue.csv"), revenue_csv.str());

        auto ledger_json = [](const adopt::SimulationLedger& l) {
            return ordered_json{{"clicks", l.totals.clicks},
                                {"impressions", l.totals.impressions},
                                {"spend", num(l.totals.spend())},
                                {"cost_per_click", num(l.cost_per_click())},
                                {"options_exercised", l.totals.options_exercised}};
        };
        ordered_json summary;
        summary["command"] = "simulate";
        summary["regime"] = adopt::to_string(adopt::classify_market(path, params.spot));
        summary["spot"] = num(params.spot);
        summary["strike_cpc"] = num(strike_cpc);
        summary["option_price"] = num(premium);
        summary["rtb"] = ledger_json(rtb);
        summary["options"] = ledger_json(opt);
        summary["options"]["degenerate"] = opt.degenerate;
        summary["revenue"] = {{"sell_ratio", num(sell_ratio)},
                              {"mean", num(revenue.mean)},
                              {"std", num(revenue.std_dev)},
                              {"rtb_only_mean", num(baseline.mean)},
                              {"rtb_only_std", num(baseline.std_dev)}};
        const auto text = summary.dump(2) + "\n";
        write_text(join_path(out_dir, "summary.json"), text);
        std::cout << text;
        return kExitOk;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ad option pricing, diagnostics and market simulation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "adopt 1.0");

    PriceCmd price;
    ConvergeCmd converge;
    DiagnoseCmd diagnose;
    EstimateCmd estimate;
    ValidateCmd validate;
    SimulateCmd simulate;
    auto* price_app = app.add_subcommand("price", "Price one option");
    auto* converge_app = app.add_subcommand("converge", "Lattice convergence table against the closed form");
    auto* diagnose_app = app.add_subcommand("diagnose", "Test a price series for the GBM assumption");
    auto* estimate_app = app.add_subcommand("estimate", "Estimate GBM / SV parameters from a price series");
    auto* validate_app = app.add_subcommand("validate", "Check SV lattice prices against Monte Carlo intervals");
    auto* simulate_app = app.add_subcommand("simulate", "Advertiser delivery and publisher revenue simulation");
    price.attach(price_app);
    converge.attach(converge_app);
    diagnose.attach(diagnose_app);
    estimate.attach(estimate_app);
    validate.attach(validate_app);
    simulate.attach(simulate_app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        for (auto* sub : app.get_subcommands()) apply_json_config(sub);
        if (price_app->parsed()) return price.run();
        if (converge_app->parsed()) return converge.run(*converge_app);
        if (diagnose_app->parsed()) return diagnose.run();
        if (estimate_app->parsed()) return estimate.run();
        if (validate_app->parsed()) return validate.run();
        if (simulate_app->parsed()) return simulate.run();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
