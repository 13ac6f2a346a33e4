#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "apportion/rational.hpp"

namespace apportion {

/// A configuration no rounding can serve. hints() suggests remedies.
class InfeasibleConfig : public std::runtime_error {
public:
    InfeasibleConfig(const std::string& what, std::vector<std::string> hints)
        : std::runtime_error(what), hints_(std::move(hints)) {}
    const std::vector<std::string>& hints() const { return hints_; }

private:
    std::vector<std::string> hints_;
};

/// Repeated lottery for a commission of `seats` members.
struct SortitionConfig {
    std::vector<std::string> names;
    std::vector<Rational> weights;  // positive
    std::int64_t seats = 0;
    std::size_t rounds = 1;
    /// Optional per-round weights (rounds x members) replacing `weights`.
    std::vector<std::vector<Rational>> round_weights;

    /// seats * w_i / sum of w in round t (1-based).
    std::vector<Rational> selection_probabilities(std::size_t t) const;
    /// Throws InfeasibleConfig or std::invalid_argument.
    void validate() const;
};

struct SortitionAudit {
    Rational min_probability;
    std::int64_t window = 0;                  // ceil(2 / min_probability)
    std::vector<std::int64_t> longest_absence;  // most consecutive rounds unselected, per member
    std::vector<std::int64_t> selections;       // per member over all rounds
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

struct SortitionResult {
    std::vector<std::vector<std::size_t>> selected;  // per round, ascending member indices
    SortitionAudit audit;
};

SortitionResult run_sortition(const SortitionConfig& config, std::uint64_t seed);

/// Courses (or shifts) assigned to faculty every semester with fixed weights.
struct AssignmentConfig {
    struct Entry {
        std::size_t faculty;
        std::size_t course;
        Rational weight;
    };
    std::vector<std::string> faculty;
    std::vector<std::string> courses;
    std::vector<Entry> entries;
    std::size_t semesters = 1;

    void validate() const;
};

struct AssignmentResult {
    /// Per semester, (faculty, course) pairs in entry order.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> taught;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

AssignmentResult run_assignment(const AssignmentConfig& config, std::uint64_t seed);

/// {"members": [{"name": ..., "weight": "..."}], "seats": k, "round_weights": [[...]]?}
SortitionConfig sortition_config_from_json(const nlohmann::json& doc, std::size_t rounds);
/// {"faculty": [...], "courses": [...], "weights": [{"faculty": ..., "course": ..., "weight": "..."}]}
AssignmentConfig assignment_config_from_json(const nlohmann::json& doc, std::size_t semesters);

void write_sortition_csv(std::ostream& out, const SortitionConfig& config, const SortitionResult& result);
void write_assignment_csv(std::ostream& out, const AssignmentConfig& config, const AssignmentResult& result);

nlohmann::ordered_json to_json(const SortitionConfig& config, const SortitionAudit& audit);
nlohmann::ordered_json to_json(const AssignmentConfig& config, const AssignmentResult& result);

}  // namespace apportion
