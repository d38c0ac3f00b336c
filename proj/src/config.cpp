#include "mgt/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace mgt {

namespace detail {
extern const char* const kConfigSchemaText;
extern const char* const kReportSchemaText;
}  // namespace detail

using nlohmann::json;

const json& config_schema() {
    static const json schema = json::parse(detail::kConfigSchemaText);
    return schema;
}

const json& report_schema() {
    static const json schema = json::parse(detail::kReportSchemaText);
    return schema;
}

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

bool has_type(const json& v, const std::string& type) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "boolean") return v.is_boolean();
    if (type == "integer") return v.is_number_integer();
    if (type == "number") return v.is_number();
    if (type == "null") return v.is_null();
    throw std::logic_error("schema uses unsupported type " + type);
}

const json& resolve(const json& schema, const json& root) {
    if (!schema.contains("$ref")) return schema;
    const std::string ref = schema.at("$ref");
    const std::string prefix = "#/$defs/";
    if (ref.rfind(prefix, 0) != 0) throw std::logic_error("schema uses unsupported reference " + ref);
    return root.at("$defs").at(ref.substr(prefix.size()));
}

void validate_node(const json& doc, const json& schema_in, const json& root, const std::string& path) {
    const json& schema = resolve(schema_in, root);
    if (schema.contains("type") && !has_type(doc, schema.at("type")))
        throw ConfigError(path, "expected " + schema.at("type").get<std::string>());
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& option : schema.at("enum")) found = found || option == doc;
        if (!found) throw ConfigError(path, "value " + doc.dump() + " not in " + schema.at("enum").dump());
    }
    if (doc.is_number()) {
        const double v = doc.get<double>();
        if (schema.contains("minimum") && v < schema.at("minimum").get<double>())
            throw ConfigError(path, "must be at least " + schema.at("minimum").dump());
        if (schema.contains("maximum") && v > schema.at("maximum").get<double>())
            throw ConfigError(path, "must be at most " + schema.at("maximum").dump());
        if (schema.contains("exclusiveMinimum") && !(v > schema.at("exclusiveMinimum").get<double>()))
            throw ConfigError(path, "must be greater than " + schema.at("exclusiveMinimum").dump());
    }
    if (doc.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema.at("required"))
                if (!doc.contains(key.get<std::string>()))
                    throw ConfigError(join(path, key.get<std::string>()), "required field is missing");
        const json empty = json::object();
        const json& props = schema.contains("properties") ? schema.at("properties") : empty;
        const bool closed = schema.contains("additionalProperties") && schema.at("additionalProperties") == false;
        for (const auto& [key, value] : doc.items()) {
            if (props.contains(key))
                validate_node(value, props.at(key), root, join(path, key));
            else if (closed)
                throw ConfigError(join(path, key), "unknown field");
        }
    }
    if (doc.is_array()) {
        const auto n = doc.size();
        if (schema.contains("minItems") && n < schema.at("minItems").get<std::size_t>())
            throw ConfigError(path, "needs at least " + schema.at("minItems").dump() + " items");
        if (schema.contains("maxItems") && n > schema.at("maxItems").get<std::size_t>())
            throw ConfigError(path, "allows at most " + schema.at("maxItems").dump() + " items");
        if (schema.contains("items"))
            for (std::size_t k = 0; k < n; ++k)
                validate_node(doc[k], schema.at("items"), root, path + "[" + std::to_string(k) + "]");
    }
}

template <class T>
T value_or(const json& obj, const char* key, T fallback) {
    return obj.contains(key) ? obj.at(key).get<T>() : fallback;
}

std::function<double(double)> optional_function(const json& parent, const char* key, double x_left, double x_right,
                                                double fallback) {
    if (!parent.contains(key)) return [fallback](double) { return fallback; };
    return space_function(parent.at(key), x_left, x_right);
}

void write_json(std::ostream& os, const json& v, int indent, int depth) {
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent) * (depth + 1), ' ') : "";
    const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent) * depth, ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    const char* sep = indent > 0 ? ": " : ":";
    switch (v.type()) {
        case json::value_t::object: {
            if (v.empty()) {
                os << "{}";
                return;
            }
            os << '{' << nl;
            bool first = true;
            for (const auto& [key, value] : v.items()) {
                if (!first) os << ',' << nl;
                first = false;
                os << pad << json(key).dump() << sep;
                write_json(os, value, indent, depth + 1);
            }
            os << nl << close_pad << '}';
            return;
        }
        case json::value_t::array: {
            if (v.empty()) {
                os << "[]";
                return;
            }
            os << '[' << nl;
            for (std::size_t k = 0; k < v.size(); ++k) {
                if (k > 0) os << ',' << nl;
                os << pad;
                write_json(os, v[k], indent, depth + 1);
            }
            os << nl << close_pad << ']';
            return;
        }
        case json::value_t::number_float: {
            const double d = v.get<double>();
            if (!std::isfinite(d)) {
                os << "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", d);
            std::string text = buf;
            if (text.find_first_of(".eEn") == std::string::npos) text += ".0";
            os << text;
            return;
        }
        default: os << v.dump();
    }
}

}  // namespace

void validate_against_schema(const json& doc, const json& schema) { validate_node(doc, schema, schema, ""); }

std::function<double(double)> space_function(const json& spec, double x_left, double x_right) {
    const std::string kind = spec.at("kind");
    if (kind == "constant") {
        if (!spec.contains("value")) throw ConfigError("value", "constant function needs a value");
        const double v = spec.at("value");
        return [v](double) { return v; };
    }
    if (kind != "fourier") throw ConfigError("kind", "unknown function kind " + kind);
    const double offset = value_or(spec, "offset", 0.0);
    const auto sin_c = value_or(spec, "sin", std::vector<double>{});
    const auto cos_c = value_or(spec, "cos", std::vector<double>{});
    const double len = x_right - x_left;
    return [=](double x) {
        const double z = std::numbers::pi * (x - x_left) / len;
        double v = offset;
        for (std::size_t k = 0; k < sin_c.size(); ++k) v += sin_c[k] * std::sin((k + 1) * z);
        for (std::size_t k = 0; k < cos_c.size(); ++k) v += cos_c[k] * std::cos((k + 1) * z);
        return v;
    };
}

std::function<double(double, double)> manufactured_cubic_source(std::function<double(double)> gamma, double c,
                                                                double b, double x_left, double x_right) {
    const double k = std::numbers::pi / (x_right - x_left);
    return [=](double x, double t) {
        const double alpha = gamma(x) + c * c / b;
        return std::sin(k * (x - x_left)) * (6.0 + 6.0 * alpha * t + k * k * (c * c * t * t * t + 3.0 * b * t * t));
    };
}

RunConfig parse_config(const json& doc) {
    validate_against_schema(doc, config_schema());
    RunConfig rc;
    rc.document = doc;
    ReconstructionConfig& r = rc.recon;

    const json& g = doc.at("grid");
    try {
        r.grid = build_grid(value_or(g, "x_left", 0.0), value_or(g, "x_right", 1.0), g.at("Nx").get<int>(),
                            g.at("T").get<double>(), g.at("Nt").get<int>());
    } catch (const InvalidInput& e) {
        throw ConfigError("grid", e.what());
    }
    const double xl = r.grid.x_left;
    const double xr = r.grid.x_right;

    const json& co = doc.at("coefficients");
    r.c = co.at("c");
    r.b = co.at("b");
    r.box_bound = co.at("M");
    if (r.c == 0.0) throw ConfigError("coefficients.c", "must be nonzero");

    if (doc.contains("gamma_true")) rc.gamma_true = space_function(doc.at("gamma_true"), xl, xr);
    if (co.contains("gamma"))
        rc.gamma_forward = space_function(co.at("gamma"), xl, xr);
    else if (rc.gamma_true)
        rc.gamma_forward = *rc.gamma_true;

    const json& id = doc.at("initial_data");
    r.data.u0 = optional_function(id, "u0", xl, xr, 0.0);
    r.data.u1 = optional_function(id, "u1", xl, xr, 0.0);
    r.data.u2 = space_function(id.at("u2"), xl, xr);
    r.data.eta = value_or(id, "eta", 0.0);

    if (doc.contains("source") && doc.at("source").at("kind") == "manufactured_cubic") {
        rc.source = SourceKind::manufactured_cubic;
        r.data.source = manufactured_cubic_source(rc.gamma_forward, r.c, r.b, xl, xr);
    }
    r.boundary = value_or(doc, "boundary", std::string("homogeneous")) == "compatible" ? BoundaryMode::compatible
                                                                                        : BoundaryMode::homogeneous;

    const json& ca = doc.at("carleman");
    r.geometry.x0 = ca.at("x0");
    r.geometry.beta = ca.at("beta");
    r.geometry.m0 = ca.at("M0");
    r.geometry.final_time = r.grid.final_time;
    r.geometry.observed_sides.clear();
    if (ca.contains("observed"))
        for (const auto& s : ca.at("observed")) r.geometry.observed_sides.push_back(side_from_string(s));
    r.scales.lambda = value_or(ca, "lambda", 1.0);
    r.scales.s = value_or(ca, "s", 1.0);

    if (doc.contains("reconstruction")) {
        const json& re = doc.at("reconstruction");
        r.max_iterations = value_or(re, "max_iterations", r.max_iterations);
        r.stop_tol = value_or(re, "stop_tol", r.stop_tol);
        r.data_factor = value_or(re, "data_factor", r.data_factor);
        r.noise_level = value_or(re, "noise_level", r.noise_level);
        r.smoothing_window = value_or(re, "smoothing_window", r.smoothing_window);
        if (r.smoothing_window > 1 && r.smoothing_window % 2 == 0)
            throw ConfigError("reconstruction.smoothing_window", "must be 0, 1 or odd");
        r.minimizer.solver =
            value_or(re, "solver", std::string("cg")) == "direct" ? LinearSolver::direct : LinearSolver::cg;
        r.minimizer.tolerance = value_or(re, "solver_tol", r.minimizer.tolerance);
        r.minimizer.max_iterations = value_or(re, "max_solver_iterations", r.minimizer.max_iterations);
        r.s_sweep = value_or(re, "s_sweep", r.s_sweep);
        if (re.contains("initial_gamma"))
            r.initial_gamma = sample_field(r.grid, space_function(re.at("initial_gamma"), xl, xr));
    }

    if (doc.contains("verify")) {
        const json& v = doc.at("verify");
        VerifySettings& vs = rc.verify;
        vs.samples = value_or(v, "samples", vs.samples);
        vs.pairs = value_or(v, "pairs", vs.pairs);
        vs.s_values = value_or(v, "s_values", vs.s_values);
        vs.lambda = value_or(v, "lambda", vs.lambda);
        vs.m0_sweep = value_or(v, "m0_sweep", vs.m0_sweep);
        vs.claimed_log10 = value_or(v, "claimed_log10", vs.claimed_log10);
        vs.refine = value_or(v, "refine", vs.refine);
    }
    override_seed(rc, value_or(doc, "seed", std::uint64_t{0}));
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", "syntax error in " + path + ": " + e.what());
    }
    return parse_config(doc);
}

void override_seed(RunConfig& config, std::uint64_t seed) {
    config.seed = seed;
    config.recon.seed = seed;
}

std::string to_json_text(const json& value, int indent) {
    std::ostringstream os;
    write_json(os, value, indent, 0);
    if (indent > 0) os << '\n';
    return os.str();
}

}  // namespace mgt
