#pragma once

// JSON files for signals, level sets, frequency choices, bitiles, trees and
// certificates. Rationals are written as "n" or "n/d" strings; floats as
// round-trippable decimal strings.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tilewalsh/certificate.hpp"
#include "tilewalsh/dyadic.hpp"
#include "tilewalsh/signal.hpp"
#include "tilewalsh/timefreq.hpp"

namespace tilewalsh {

using Json = nlohmann::ordered_json;

/// Throws std::runtime_error naming the file on read or parse failure.
Json read_json_file(const std::filesystem::path& path);
/// Two-space indent and a trailing newline.
std::string dump_json(const Json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

Json rational_json(const Rational& r);
Json real_json(double x);
Json quantity_json(const Quantity& q);
Json lq_json(const LqValue& v);
/// Accepts strings ("3", "-1/4", "0.25") and JSON numbers.
Rational rational_from_json(const Json& j);

Json signal_to_json(const Signal& f);
Signal signal_from_json(const Json& j);

Json level_set_to_json(const LevelSet& s);
/// {"levels", "cells": [...]} or {"levels", "bits": "0110..."}.
LevelSet level_set_from_json(const Json& j);

Json frequency_choice_to_json(const FrequencyChoice& n);
FrequencyChoice frequency_choice_from_json(const Json& j);

Json bitile_json(const Bitile& b);
Bitile bitile_from_json(const Json& j);
Json bitiles_json(const std::vector<Bitile>& v);
Json tree_json(const Tree& t);
Tree tree_from_json(const Json& j);

/// {"levels", "trees": [...]}.
Json tree_family_to_json(int levels, const TreeFamily& family);
TreeFamily tree_family_from_json(const Json& j, int levels);

Json certificate_json(const Certificate& c);

/// Rows of the plotting table L,q,norm,ratio_name,value.
struct RatioRow {
  int levels = 0;
  double q = 2.0;
  std::string norm;
  std::string name;
  double value = 0.0;
};
std::string ratio_csv(const std::vector<RatioRow>& rows);

}  // namespace tilewalsh
