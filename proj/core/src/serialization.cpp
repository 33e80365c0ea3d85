#include "vvix/serialization.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"

namespace vvix {
namespace {

using nlohmann::json;

std::string csv_field(double value) {
    return std::isnan(value) ? std::string() : format_double(value);
}

// One CSV line split at commas (no quoting in this format).
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(current);
            current.clear();
        } else if (ch != '\r') {
            current += ch;
        }
    }
    fields.push_back(current);
    return fields;
}

double parse_double_field(const std::string& field, std::size_t row, std::size_t column) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw CsvError(row, column, "expected a number, got \"" + field + "\"");
    }
    return value;
}

json params_json(const HestonParams& p, const MarketConvention& c) {
    return json{{"v0", p.v0},   {"kappa", p.kappa}, {"theta", p.theta}, {"rho", p.rho},
                {"sigma", p.sigma}, {"r", c.r},     {"q", c.q},         {"rC", c.r_C},
                {"delta", c.delta}};
}

}  // namespace

CsvError::CsvError(std::size_t row_in, std::size_t column_in, const std::string& what)
    : std::runtime_error("CSV row " + std::to_string(row_in) + ", column " +
                         std::to_string(column_in) + ": " + what),
      row(row_in),
      column(column_in) {}

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) throw std::runtime_error("failed to format a double");
    return std::string(buffer, ptr);
}

std::string params_to_json(const HestonParams& params, const MarketConvention& conv) {
    return params_json(params, conv).dump(2) + "\n";
}

void params_from_json(const std::string& text, HestonParams& params, MarketConvention& conv) {
    const json doc = json::parse(text);
    if (!doc.is_object()) throw std::runtime_error("parameter document must be a JSON object");
    for (const char* key : {"v0", "kappa", "theta", "rho", "sigma"}) {
        if (!doc.contains(key)) {
            throw std::runtime_error(std::string("parameter document is missing \"") + key +
                                     "\"");
        }
    }
    params.v0 = doc.at("v0").get<double>();
    params.kappa = doc.at("kappa").get<double>();
    params.theta = doc.at("theta").get<double>();
    params.rho = doc.at("rho").get<double>();
    params.sigma = doc.at("sigma").get<double>();
    conv = MarketConvention{};
    conv.r = doc.value("r", conv.r);
    conv.q = doc.value("q", conv.q);
    conv.r_C = doc.value("rC", conv.r_C);
    conv.delta = doc.value("delta", conv.delta);
    params.validate();
}

HestonParams resolve_params_source(const std::string& source, MarketConvention& conv) {
    if (source.size() == 4 && source.compare(0, 3, "set") == 0 && source[3] >= '1' &&
        source[3] <= '6') {
        conv = MarketConvention{};
        return preset_params(source);
    }
    HestonParams params{};
    params_from_json(read_text_file(source), params, conv);
    return params;
}

std::string quotes_to_csv(const std::vector<VanillaQuote>& quotes) {
    std::string out = "maturity,strike,type,price,impliedVol,discount\n";
    for (const VanillaQuote& q : quotes) {
        out += format_double(q.maturity);
        out += ',';
        out += format_double(q.strike);
        out += ',';
        out += q.is_call ? "call" : "put";
        out += ',';
        out += format_double(q.price);
        out += ',';
        out += csv_field(q.implied_vol);
        out += ',';
        out += format_double(q.discount);
        out += '\n';
    }
    return out;
}

std::vector<VanillaQuote> quotes_from_csv(const std::string& text) {
    std::istringstream stream(text);
    std::string line;
    std::size_t row = 0;
    std::vector<VanillaQuote> quotes;
    bool saw_header = false;
    while (std::getline(stream, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (!saw_header) {
            if (fields.size() != 6 || fields[0] != "maturity" || fields[1] != "strike" ||
                fields[2] != "type" || fields[3] != "price" || fields[4] != "impliedVol" ||
                fields[5] != "discount") {
                throw CsvError(row, 1,
                               "expected header maturity,strike,type,price,impliedVol,discount");
            }
            saw_header = true;
            continue;
        }
        if (fields.size() != 6) {
            throw CsvError(row, fields.size(), "expected 6 fields, got " +
                                                   std::to_string(fields.size()));
        }
        VanillaQuote q{};
        q.maturity = parse_double_field(fields[0], row, 1);
        q.strike = parse_double_field(fields[1], row, 2);
        const std::string& type = fields[2];
        const char first = type.empty() ? '\0' : static_cast<char>(std::tolower(type[0]));
        if (first == 'c') {
            q.is_call = true;
        } else if (first == 'p') {
            q.is_call = false;
        } else {
            throw CsvError(row, 3, "option type must be call or put, got \"" + type + "\"");
        }
        q.price = parse_double_field(fields[3], row, 4);
        q.implied_vol = fields[4].empty() ? std::numeric_limits<double>::quiet_NaN()
                                          : parse_double_field(fields[4], row, 5);
        q.discount = fields[5].empty() ? 1.0 : parse_double_field(fields[5], row, 6);
        quotes.push_back(q);
    }
    if (!saw_header) throw CsvError(1, 1, "empty quote sheet");
    return quotes;
}

std::string strikes_to_json(const std::vector<double>& strikes) {
    return json(strikes).dump() + "\n";
}

std::vector<double> strikes_from_json(const std::string& text) {
    const json doc = json::parse(text);
    if (!doc.is_array()) throw std::runtime_error("strike ladder must be a JSON array");
    return doc.get<std::vector<double>>();
}

std::string calibration_result_to_json(const CalibrationResult& result) {
    json doc;
    doc["parameters"] = {{"v0", result.params.v0},
                         {"kappa", result.params.kappa},
                         {"theta", result.params.theta},
                         {"rho", result.params.rho},
                         {"sigma", result.params.sigma}};
    doc["objective"] = result.objective;
    doc["converged"] = result.converged;
    doc["gnIterations"] = result.gn_iterations;
    doc["decisionDimension"] = result.decision_dimension;
    doc["objectiveEvaluations"] = result.objective_evaluations;
    doc["residuals"] = result.residuals;
    doc["vvix"] = {{"simple", result.vvix_simple_points},
                   {"logContract", result.vvix_log_points},
                   {"replication", result.vvix_replication_points}};
    return doc.dump(2) + "\n";
}

CalibrationResult calibration_result_from_json(const std::string& text) {
    const json doc = json::parse(text);
    CalibrationResult result{};
    const json& p = doc.at("parameters");
    result.params.v0 = p.at("v0").get<double>();
    result.params.kappa = p.at("kappa").get<double>();
    result.params.theta = p.at("theta").get<double>();
    result.params.rho = p.at("rho").get<double>();
    result.params.sigma = p.at("sigma").get<double>();
    result.objective = doc.at("objective").get<double>();
    result.converged = doc.at("converged").get<bool>();
    result.gn_iterations = doc.at("gnIterations").get<int>();
    result.decision_dimension = doc.at("decisionDimension").get<std::size_t>();
    result.objective_evaluations = doc.at("objectiveEvaluations").get<std::size_t>();
    result.residuals = doc.at("residuals").get<std::vector<double>>();
    const json& v = doc.at("vvix");
    result.vvix_simple_points = v.at("simple").get<double>();
    result.vvix_log_points = v.at("logContract").get<double>();
    result.vvix_replication_points = v.at("replication").get<double>();
    return result;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file for reading: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("failed to write file: " + path);
}

}  // namespace vvix
