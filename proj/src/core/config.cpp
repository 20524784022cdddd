#include "core/config.hpp"

#include <set>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/grid.hpp"
#include "core/jsonio.hpp"
#include "core/presets.hpp"

namespace sgsde {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& pointer, const std::string& msg) {
    throw ValidationError("config error at " + pointer + ": " + msg, pointer);
}

void require_keys(const json& obj, const std::string& pointer,
                  const std::set<std::string>& required, const std::set<std::string>& optional) {
    if (!obj.is_object()) fail(pointer, "expected an object");
    for (const auto& item : obj.items()) {
        if (!required.count(item.key()) && !optional.count(item.key())) {
            fail(pointer + "/" + item.key(), "unknown key");
        }
    }
    std::string missing;
    for (const auto& k : required) {
        if (!obj.contains(k)) missing += (missing.empty() ? "" : ", ") + k;
    }
    if (!missing.empty()) fail(pointer, "missing required field(s): " + missing);
}

double get_number(const json& obj, const std::string& pointer, const std::string& key) {
    const json& v = obj.at(key);
    if (!v.is_number()) fail(pointer + "/" + key, "expected a number");
    return v.get<double>();
}

std::int64_t get_integer(const json& obj, const std::string& pointer, const std::string& key) {
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(pointer + "/" + key, "expected an integer");
    return v.get<std::int64_t>();
}

std::string get_string(const json& obj, const std::string& pointer, const std::string& key) {
    const json& v = obj.at(key);
    if (!v.is_string()) fail(pointer + "/" + key, "expected a string");
    return v.get<std::string>();
}

Matrix parse_matrix(const json& v, const std::string& pointer) {
    if (!v.is_array() || v.empty()) fail(pointer, "expected a non-empty array of rows");
    const std::size_t rows = v.size();
    std::size_t cols = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (!v[i].is_array() || v[i].empty()) {
            fail(pointer + "/" + std::to_string(i), "expected a non-empty row array");
        }
        if (i == 0) cols = v[i].size();
        if (v[i].size() != cols) fail(pointer, "rows have inconsistent lengths");
    }
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const json& e = v[i][j];
            if (!e.is_number()) {
                fail(pointer + "/" + std::to_string(i) + "/" + std::to_string(j),
                     "expected a number");
            }
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = e.get<double>();
        }
    }
    return m;
}

Vector parse_vector(const json& v, const std::string& pointer) {
    if (!v.is_array() || v.empty()) fail(pointer, "expected a non-empty array of numbers");
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) fail(pointer + "/" + std::to_string(i), "expected a number");
        out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
}

OutputFunction parse_output(const json& v, const std::string& pointer) {
    require_keys(v, pointer, {"kind", "wiring", "params", "monotonicity"}, {});
    const std::string kind_s = get_string(v, pointer, "kind");
    OutputKind kind;
    try {
        kind = output_kind_from_string(kind_s);
    } catch (const ValidationError& e) {
        fail(pointer + "/kind", e.what());
    }
    const json& wiring_j = v.at("wiring");
    if (!wiring_j.is_array() || wiring_j.empty()) {
        fail(pointer + "/wiring", "expected a non-empty array of index arrays");
    }
    std::vector<std::vector<int>> wiring;
    for (std::size_t i = 0; i < wiring_j.size(); ++i) {
        const json& row = wiring_j[i];
        if (!row.is_array()) {
            fail(pointer + "/wiring/" + std::to_string(i), "expected an array of indices");
        }
        std::vector<int> indices;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (!row[j].is_number_integer()) {
                fail(pointer + "/wiring/" + std::to_string(i) + "/" + std::to_string(j),
                     "expected an integer state index");
            }
            indices.push_back(row[j].get<int>());
        }
        wiring.push_back(std::move(indices));
    }
    const json& params_j = v.at("params");
    if (!params_j.is_array() || params_j.size() != wiring.size()) {
        fail(pointer + "/params", "expected one parameter array per output coordinate");
    }
    std::vector<std::vector<double>> params;
    for (std::size_t i = 0; i < params_j.size(); ++i) {
        const json& row = params_j[i];
        if (!row.is_array()) {
            fail(pointer + "/params/" + std::to_string(i), "expected an array of numbers");
        }
        std::vector<double> p;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (!row[j].is_number()) {
                fail(pointer + "/params/" + std::to_string(i) + "/" + std::to_string(j),
                     "expected a number");
            }
            p.push_back(row[j].get<double>());
        }
        params.push_back(std::move(p));
    }
    const std::string mono_s = get_string(v, pointer, "monotonicity");
    Monotonicity mono;
    if (mono_s == "order-preserving") {
        mono = Monotonicity::OrderPreserving;
    } else if (mono_s == "anti-order-preserving") {
        mono = Monotonicity::AntiOrderPreserving;
    } else {
        fail(pointer + "/monotonicity",
             "expected 'order-preserving' or 'anti-order-preserving'");
    }
    try {
        return OutputFunction(kind, std::move(wiring), std::move(params), mono);
    } catch (const ValidationError& e) {
        fail(pointer, e.what());
    }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not well-formed JSON: ") + e.what());
    }
    require_keys(doc, "", {"system", "grid"},
                 {"seeds", "check", "simulate", "pullback", "equilibrium", "stationary"});

    const json& sys = doc.at("system");
    require_keys(sys, "/system", {"A", "sigma", "h", "L"}, {});
    const Matrix a = parse_matrix(sys.at("A"), "/system/A");
    if (a.rows() != a.cols()) fail("/system/A", "must be square");
    const Matrix sigma = parse_matrix(sys.at("sigma"), "/system/sigma");
    if (sigma.rows() != a.rows()) fail("/system/sigma", "row count must match A");
    const double lipschitz = get_number(sys, "/system", "L");
    if (!(lipschitz >= 0.0)) fail("/system/L", "must be nonnegative");
    OutputFunction h = parse_output(sys.at("h"), "/system/h");
    if (h.dim() != a.rows()) fail("/system/h/wiring", "must have one entry per state coordinate");

    RunConfig cfg{[&]() -> SystemSpec {
        try {
            return SystemSpec(a, sigma, std::move(h), lipschitz);
        } catch (const ValidationError& e) {
            fail("/system", e.what());
        }
    }()};

    const json& grid = doc.at("grid");
    require_keys(grid, "/grid", {"dt", "t_past", "t_fwd"}, {});
    cfg.grid.dt = get_number(grid, "/grid", "dt");
    if (!(cfg.grid.dt > 0.0)) fail("/grid/dt", "must be positive");
    cfg.grid.t_past = get_number(grid, "/grid", "t_past");
    cfg.grid.t_fwd = get_number(grid, "/grid", "t_fwd");
    if (!(cfg.grid.t_past > 0.0)) fail("/grid/t_past", "must be positive");
    if (cfg.grid.t_fwd < 0.0) fail("/grid/t_fwd", "must be nonnegative");
    try {
        to_step(cfg.grid.t_past, cfg.grid.dt, "/grid/dt");
        to_step(cfg.grid.t_fwd, cfg.grid.dt, "/grid/dt");
    } catch (const ValidationError&) {
        fail("/grid/dt", "horizons must be integer multiples of dt");
    }

    if (doc.contains("seeds")) {
        const json& seeds = doc.at("seeds");
        require_keys(seeds, "/seeds", {}, {"base", "count"});
        if (seeds.contains("base")) {
            const json& b = seeds.at("base");
            if (!b.is_number_integer() || b.get<std::int64_t>() < 0) {
                fail("/seeds/base", "expected a nonnegative integer");
            }
            cfg.seeds.base = b.get<std::uint64_t>();
        }
        if (seeds.contains("count")) {
            cfg.seeds.count = get_integer(seeds, "/seeds", "count");
            if (cfg.seeds.count < 1) fail("/seeds/count", "must be >= 1");
        }
    }

    if (doc.contains("check")) {
        const json& c = doc.at("check");
        require_keys(c, "/check", {}, {"t_max", "n_points"});
        if (c.contains("t_max")) {
            cfg.check.t_max = get_number(c, "/check", "t_max");
            if (!(cfg.check.t_max > 0.0)) fail("/check/t_max", "must be positive");
        }
        if (c.contains("n_points")) {
            cfg.check.n_points = static_cast<int>(get_integer(c, "/check", "n_points"));
            if (cfg.check.n_points < 2) fail("/check/n_points", "must be >= 2");
        }
    }

    if (doc.contains("simulate")) {
        const json& s = doc.at("simulate");
        require_keys(s, "/simulate", {"x0", "t1"}, {"t0"});
        SimulateParams p;
        p.x0 = parse_vector(s.at("x0"), "/simulate/x0");
        if (p.x0.size() != cfg.system.d) fail("/simulate/x0", "dimension must match the system");
        if (s.contains("t0")) p.t0 = get_number(s, "/simulate", "t0");
        p.t1 = get_number(s, "/simulate", "t1");
        if (!(p.t1 > p.t0)) fail("/simulate/t1", "must exceed t0");
        if (p.t1 > cfg.grid.t_fwd || p.t0 < -cfg.grid.t_past) {
            fail("/simulate/t1", "window must lie inside [-t_past, t_fwd]");
        }
        cfg.simulate = p;
    }

    if (doc.contains("pullback")) {
        const json& s = doc.at("pullback");
        require_keys(s, "/pullback", {"x", "t_max"}, {});
        PullbackParams p;
        p.x = parse_vector(s.at("x"), "/pullback/x");
        if (p.x.size() != cfg.system.d) fail("/pullback/x", "dimension must match the system");
        p.t_max = get_number(s, "/pullback", "t_max");
        if (!(p.t_max > 0.0)) fail("/pullback/t_max", "must be positive");
        if (p.t_max > cfg.grid.t_past) fail("/pullback/t_max", "cannot exceed t_past");
        cfg.pullback = p;
    }

    if (doc.contains("equilibrium")) {
        const json& e = doc.at("equilibrium");
        require_keys(e, "/equilibrium", {}, {"tol", "max_iter"});
        if (e.contains("tol")) {
            cfg.equilibrium.tol = get_number(e, "/equilibrium", "tol");
            if (!(cfg.equilibrium.tol > 0.0)) fail("/equilibrium/tol", "must be positive");
        }
        if (e.contains("max_iter")) {
            cfg.equilibrium.max_iter =
                static_cast<int>(get_integer(e, "/equilibrium", "max_iter"));
            if (cfg.equilibrium.max_iter < 1) fail("/equilibrium/max_iter", "must be >= 1");
        }
    }

    if (doc.contains("stationary")) {
        const json& s = doc.at("stationary");
        require_keys(s, "/stationary", {}, {"mode", "samples", "burn_in", "bins", "density_grid"});
        if (s.contains("mode")) {
            try {
                cfg.stationary.mode = sampling_mode_from_string(get_string(s, "/stationary", "mode"));
            } catch (const ValidationError& e) {
                fail("/stationary/mode", e.what());
            }
        }
        if (s.contains("samples")) {
            cfg.stationary.samples = get_integer(s, "/stationary", "samples");
            if (cfg.stationary.samples < 2) fail("/stationary/samples", "must be >= 2");
        }
        if (s.contains("burn_in")) {
            cfg.stationary.burn_in = get_number(s, "/stationary", "burn_in");
            if (!(cfg.stationary.burn_in > 0.0)) fail("/stationary/burn_in", "must be positive");
        }
        if (s.contains("bins")) {
            cfg.stationary.bins = static_cast<int>(get_integer(s, "/stationary", "bins"));
            if (cfg.stationary.bins < 0) fail("/stationary/bins", "must be >= 0");
        }
        if (s.contains("density_grid")) {
            const json& g = s.at("density_grid");
            require_keys(g, "/stationary/density_grid", {"min", "max", "points"}, {});
            DensityGridParams dg;
            dg.min = get_number(g, "/stationary/density_grid", "min");
            dg.max = get_number(g, "/stationary/density_grid", "max");
            dg.points = static_cast<int>(get_integer(g, "/stationary/density_grid", "points"));
            if (!(dg.max > dg.min)) fail("/stationary/density_grid/max", "must exceed min");
            if (dg.points < 3) fail("/stationary/density_grid/points", "must be >= 3");
            if (cfg.system.d != 1) {
                fail("/stationary/density_grid", "closed-form density requires a 1-D system");
            }
            cfg.stationary.density = dg;
        }
    }

    return cfg;
}

std::string preset_config_json(const std::string& preset_id) {
    const Preset p = make_preset(preset_id);
    JsonWriter w;
    w.begin_object();
    w.key("system").begin_object();
    w.key("A").value(p.spec.a);
    w.key("sigma").value(p.spec.sigma);
    w.key("h").begin_object();
    w.key("kind").value(to_string(p.spec.h.kind()));
    w.key("wiring").begin_array();
    for (const auto& row : p.spec.h.wiring()) {
        w.begin_array();
        for (int j : row) w.value(j);
        w.end_array();
    }
    w.end_array();
    w.key("params").begin_array();
    for (const auto& row : p.spec.h.params()) {
        w.begin_array();
        for (double v : row) w.value(v);
        w.end_array();
    }
    w.end_array();
    w.key("monotonicity").value(to_string(p.spec.h.monotonicity()));
    w.end_object();
    w.key("L").value(p.spec.lipschitz);
    w.end_object();
    w.key("grid").begin_object();
    w.key("dt").value(p.dt);
    w.key("t_past").value(p.t_past);
    w.key("t_fwd").value(p.t_fwd);
    w.end_object();
    w.key("seeds").begin_object();
    w.key("base").value(p.seed);
    w.key("count").value(std::int64_t{1});
    w.end_object();
    w.end_object();
    return w.str() + "\n";
}

}  // namespace sgsde
