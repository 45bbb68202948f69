#include "hardylab/symbol_json.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace hardylab {

using namespace symbol;

json complex_to_json(cplx c) { return json::array({c.real(), c.imag()}); }

cplx complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw std::invalid_argument("expected a complex number as [re, im], got " + j.dump());
}

namespace {

json coeffs_to_json(const std::vector<cplx>& c) {
    json a = json::array();
    for (const auto& x : c) a.push_back(complex_to_json(x));
    return a;
}

std::vector<cplx> coeffs_from_json(const json& j, const char* field) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument(std::string("field '") + field + "' must be a nonempty array");
    std::vector<cplx> c;
    for (const auto& x : j) c.push_back(complex_from_json(x));
    return c;
}

const json& field(const json& j, const char* name) {
    if (!j.contains(name)) throw std::invalid_argument(std::string("missing field '") + name + "'");
    return j.at(name);
}

}  // namespace

json symbol_to_json(const SymbolSpec& spec) {
    json out;
    out["tag"] = spec.tag();
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Polynomial>) {
                out["coeffs"] = coeffs_to_json(n.coeffs);
            } else if constexpr (std::is_same_v<T, Moebius>) {
                out["a"] = complex_to_json(n.a);
            } else if constexpr (std::is_same_v<T, Scale>) {
                out["lambda"] = complex_to_json(n.factor);
                out["inner"] = symbol_to_json(*n.inner);
            } else if constexpr (std::is_same_v<T, Shift>) {
                out["c"] = complex_to_json(n.offset);
                out["inner"] = symbol_to_json(*n.inner);
            } else if constexpr (std::is_same_v<T, Compose>) {
                out["outer"] = symbol_to_json(*n.outer);
                out["inner"] = symbol_to_json(*n.inner);
            } else if constexpr (std::is_same_v<T, Raw>) {
                out["coeffs"] = coeffs_to_json(n.series.coeffs());
                if (n.series.exact_degree()) out["exact_degree"] = *n.series.exact_degree();
            }
        },
        spec.node());
    return out;
}

SymbolSpec symbol_from_json(const json& j) {
    if (j.is_string()) {
        SymbolSpec s = SymbolSpec::z();
        if (symbol_from_shorthand(j.get<std::string>(), s)) return s;
        throw std::invalid_argument("unknown symbol shorthand '" + j.get<std::string>() + "'");
    }
    if (!j.is_object()) throw std::invalid_argument("symbol must be a JSON object");
    const std::string tag = field(j, "tag").get<std::string>();
    if (tag == "polynomial") return SymbolSpec::polynomial(coeffs_from_json(field(j, "coeffs"), "coeffs"));
    if (tag == "moebius") return SymbolSpec::moebius(complex_from_json(field(j, "a")));
    if (tag == "unit_singular") return SymbolSpec::unit_singular();
    if (tag == "scale")
        return SymbolSpec::scale(complex_from_json(field(j, "lambda")), symbol_from_json(field(j, "inner")));
    if (tag == "shift")
        return SymbolSpec::shift(complex_from_json(field(j, "c")), symbol_from_json(field(j, "inner")));
    if (tag == "compose")
        return SymbolSpec::compose(symbol_from_json(field(j, "outer")), symbol_from_json(field(j, "inner")));
    if (tag == "raw") {
        auto c = coeffs_from_json(field(j, "coeffs"), "coeffs");
        std::optional<int> deg;
        if (j.contains("exact_degree")) deg = j.at("exact_degree").get<int>();
        return SymbolSpec::raw(PowerSeries(std::move(c), deg));
    }
    throw std::invalid_argument("unknown tag '" + tag + "'");
}

bool symbol_from_shorthand(const std::string& name, SymbolSpec& out) {
    static const std::map<std::string, std::vector<cplx>> polys{
        {"z", {0.0, 1.0}},           {"z2z", {0.0, 1.0, 1.0}},   {"z^2+z", {0.0, 1.0, 1.0}},
        {"z+z^2", {0.0, 1.0, 1.0}},  {"z+1", {1.0, 1.0}},        {"z+2", {2.0, 1.0}},
        {"2+z^2", {2.0, 0.0, 1.0}},  {"z^2+2", {2.0, 0.0, 1.0}}, {"z/2", {0.0, 0.5}},
        {"2z", {0.0, 2.0}},          {"z/4", {0.0, 0.25}},       {"z^2", {0.0, 0.0, 1.0}},
        {"1", {1.0}},
    };
    if (name == "unit_singular") {
        out = SymbolSpec::unit_singular();
        return true;
    }
    const auto it = polys.find(name);
    if (it == polys.end()) return false;
    out = SymbolSpec::polynomial(it->second);
    return true;
}

SymbolSpec parse_symbol_argument(const std::string& arg) {
    SymbolSpec s = SymbolSpec::z();
    if (symbol_from_shorthand(arg, s)) return s;
    const auto first = arg.find_first_not_of(" \t\n");
    json j;
    if (first != std::string::npos && (arg[first] == '{' || arg[first] == '"')) {
        try {
            j = json::parse(arg);
        } catch (const json::parse_error& e) {
            throw std::invalid_argument(std::string("malformed symbol JSON: ") + e.what() +
                                        "; schema: " + kSymbolSchemaHint);
        }
    } else {
        std::ifstream in(arg);
        if (!in)
            throw std::invalid_argument("'" + arg + "' is neither a shorthand, inline JSON, nor a readable file; "
                                        "schema: " + kSymbolSchemaHint);
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw std::invalid_argument("malformed symbol JSON in " + arg + ": " + e.what());
        }
    }
    try {
        return symbol_from_json(j);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("symbol JSON: ") + e.what() + "; schema: " + kSymbolSchemaHint);
    }
}

}  // namespace hardylab
