#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "vvix/calibration.hpp"
#include "vvix/heston.hpp"

// Text formats used at the tool boundary: parameter documents, vanilla quote
// sheets, strike ladders, and calibration reports. Every writer here has a
// matching reader so emitted artifacts round-trip.

namespace vvix {

// Thrown by the CSV reader with a 1-based row/column location in the message.
struct CsvError : std::runtime_error {
    CsvError(std::size_t row, std::size_t column, const std::string& what);
    std::size_t row;
    std::size_t column;
};

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

// --- model parameters ------------------------------------------------------
// JSON document {v0, kappa, theta, rho, sigma} plus the market convention
// fields {r, q, rC, delta}; readers treat the convention block as optional.
std::string params_to_json(const HestonParams& params, const MarketConvention& conv);
void params_from_json(const std::string& text, HestonParams& params, MarketConvention& conv);

// Resolves a CLI parameter source: a preset name (set1..set6) or a path to a
// JSON document. Preset sources leave the convention at its defaults.
HestonParams resolve_params_source(const std::string& source, MarketConvention& conv);

// --- vanilla quote sheets ---------------------------------------------------
// Header: maturity,strike,type,price,impliedVol,discount. The type column is
// "call" or "put" (first letter suffices, case-insensitive); an empty
// impliedVol column reads back as NaN.
std::string quotes_to_csv(const std::vector<VanillaQuote>& quotes);
std::vector<VanillaQuote> quotes_from_csv(const std::string& text);

// --- strike ladders ----------------------------------------------------------
// Plain JSON array of ascending strikes.
std::string strikes_to_json(const std::vector<double>& strikes);
std::vector<double> strikes_from_json(const std::string& text);

// --- calibration reports -----------------------------------------------------
// JSON with the fitted parameters, objective, convergence diagnostics,
// per-quote residuals, and the VVIX of the solution under each calculator.
std::string calibration_result_to_json(const CalibrationResult& result);
CalibrationResult calibration_result_from_json(const std::string& text);

// --- small file helpers ------------------------------------------------------
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace vvix
