#include "causalmed/types.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <unordered_set>

#include "causalmed/error.hpp"

namespace causalmed {

void ObservationTable::check() const {
  if (treatment_names.empty()) {
    throw ConfigError("dataset declares no treatment columns");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : treatment_names) {
    if (name.empty()) {
      throw ConfigError("empty treatment column name");
    }
    if (!seen.insert(name).second) {
      throw ConfigError("duplicate treatment column name '" + name + "'");
    }
  }
  if (rows.empty()) {
    throw ConfigError("dataset has no rows");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.z.values.size() != treatment_names.size()) {
      throw ConfigError("row " + std::to_string(i) + " has " +
                        std::to_string(row.z.values.size()) +
                        " treatment values, expected " +
                        std::to_string(treatment_names.size()));
    }
    for (double v : row.z.values) {
      if (!std::isfinite(v)) {
        throw ConfigError("non-finite treatment value in row " +
                          std::to_string(i));
      }
    }
    if (!std::isfinite(row.mediator) || !std::isfinite(row.outcome)) {
      throw ConfigError("non-finite mediator or outcome in row " +
                        std::to_string(i));
    }
  }
}

BasisTerm BasisTerm::product(std::vector<BasisFactor> factors) {
  std::sort(factors.begin(), factors.end(),
            [](const BasisFactor& a, const BasisFactor& b) {
              return a.variable < b.variable;
            });
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].degree == 0) {
      throw ConfigError("basis term factor with zero degree");
    }
    if (i > 0 && factors[i].variable == factors[i - 1].variable) {
      throw ConfigError("basis term repeats a variable; merge the degrees");
    }
  }
  return BasisTerm{std::move(factors)};
}

bool BasisTerm::contains_variable(std::size_t v) const {
  return std::any_of(factors.begin(), factors.end(),
                     [v](const BasisFactor& f) { return f.variable == v; });
}

void BasisSpec::check() const {
  if (variables.empty()) {
    throw ConfigError("basis spec declares no treatment variables");
  }
  if (terms.empty()) {
    throw ConfigError("basis spec has no terms");
  }
  if (outcome_count < 1) {
    throw ConfigError("outcome basis is empty");
  }
  if (outcome_count >= terms.size()) {
    throw IdentificationError(
        "no instrument terms: the outcome basis spans the full mediator "
        "basis, violating Condition 1 (proper subspace required)");
  }
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const auto& term = terms[t];
    for (std::size_t i = 0; i < term.factors.size(); ++i) {
      const auto& f = term.factors[i];
      if (f.degree == 0) {
        throw ConfigError("zero degree in basis term " + std::to_string(t));
      }
      if (f.variable >= variables.size()) {
        throw ConfigError("basis term " + std::to_string(t) +
                          " references undeclared variable index " +
                          std::to_string(f.variable));
      }
      if (i > 0 && f.variable <= term.factors[i - 1].variable) {
        throw ConfigError("basis term " + std::to_string(t) +
                          " has unsorted or repeated variables");
      }
    }
    if (term.is_intercept() && t >= outcome_count) {
      throw ConfigError(
          "intercept term must belong to the outcome basis, not the "
          "instrument block");
    }
    for (std::size_t s = 0; s < t; ++s) {
      if (terms[s] == term) {
        throw ConfigError("duplicate basis term '" +
                          term_to_string(term, variables) + "'");
      }
    }
  }
}

std::string term_to_string(const BasisTerm& term,
                           const std::vector<std::string>& variables) {
  if (term.is_intercept()) {
    return "1";
  }
  std::string out;
  for (std::size_t i = 0; i < term.factors.size(); ++i) {
    const auto& f = term.factors[i];
    if (i > 0) {
      out += '*';
    }
    if (f.variable < variables.size()) {
      out += variables[f.variable];
    } else {
      out += "#" + std::to_string(f.variable);
    }
    if (f.degree != 1) {
      out += '^' + std::to_string(f.degree);
    }
  }
  return out;
}

namespace {

BasisFactor parse_factor(const std::string& text,
                         const std::vector<std::string>& variables) {
  std::string name = text;
  unsigned degree = 1;
  const auto caret = text.find('^');
  if (caret != std::string::npos) {
    name = text.substr(0, caret);
    const std::string dtext = text.substr(caret + 1);
    unsigned parsed = 0;
    const auto [ptr, ec] =
        std::from_chars(dtext.data(), dtext.data() + dtext.size(), parsed);
    if (ec != std::errc() || ptr != dtext.data() + dtext.size() ||
        parsed == 0) {
      throw ConfigError("invalid degree '" + dtext + "' in basis term '" +
                        text + "'");
    }
    degree = parsed;
  }
  const auto it = std::find(variables.begin(), variables.end(), name);
  if (it == variables.end()) {
    throw ConfigError("basis term references unknown treatment '" + name +
                      "'");
  }
  return BasisFactor{static_cast<std::size_t>(it - variables.begin()), degree};
}

}  // namespace

BasisTerm parse_term(const std::string& text,
                     const std::vector<std::string>& variables) {
  std::string trimmed;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      trimmed += c;
    }
  }
  if (trimmed.empty()) {
    throw ConfigError("empty basis term");
  }
  if (trimmed == "1") {
    return BasisTerm::intercept();
  }
  std::vector<BasisFactor> factors;
  std::size_t start = 0;
  while (start <= trimmed.size()) {
    const auto star = trimmed.find('*', start);
    const std::string piece =
        trimmed.substr(start, star == std::string::npos ? std::string::npos
                                                        : star - start);
    if (piece.empty()) {
      throw ConfigError("malformed basis term '" + text + "'");
    }
    factors.push_back(parse_factor(piece, variables));
    if (star == std::string::npos) {
      break;
    }
    start = star + 1;
  }
  return BasisTerm::product(std::move(factors));
}

}  // namespace causalmed
