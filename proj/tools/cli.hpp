#pragma once

#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pendrot/diffusion.hpp"

namespace pendrot::cli {

enum class Format { Csv, Jsonl };

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitVerify = 4;

struct RunConfig {
    // physical parameters as given
    std::optional<double> a1, a2, mu;
    int k1 = 1, k2 = 1, l1 = 0, l2 = -1;
    bool harmonics_given = false;
    std::optional<std::string> r;
    double eps = 0.01;

    std::optional<double> I_min, I_max;
    std::optional<int> grid_n;
    std::optional<int> theta_n;
    std::vector<double> I_values;
    std::string criterion = "minabs";
    Format format = Format::Csv;
    std::string out;
    int threads = 0;
    std::vector<std::string> tol_overrides;

    int samples = 201;
    double duration = 100.0;
    double phi0 = 0.0;
    double s0 = 0.0;
    double I_start = -1.0;
    double I_end = 1.0;
    unsigned seed = 1;
    std::string inject_fault;
};

/// Everything a command needs after validation.
struct Resolved {
    ReducedParams params;
    std::optional<Reduction> reduction;
    TauCriterion criterion;
    TauSearchConfig search;
    DiffusionPolicy policy;
    std::map<std::string, double> checks;  // verify-suite tolerances
    int threads = 1;
    /// Ordered key/value pairs describing the run, written into every output.
    std::vector<std::pair<std::string, std::string>> header;
};

/// Throws pendrot::Error(InvalidParams) on inconsistent input.
Resolved resolve(const RunConfig& cfg, const std::string& command);

std::string format_double(double x);

using Cell = std::variant<double, long long, std::string, bool>;

/// Serialized writer: a commented header block (CSV) or one JSON object per
/// row carrying the run header (JSON lines).
class Sink {
public:
    Sink(const RunConfig& cfg, const Resolved& res, std::string command, std::vector<std::string> columns);
    ~Sink();
    Sink(const Sink&) = delete;
    Sink& operator=(const Sink&) = delete;

    void row(const std::vector<Cell>& cells);
    /// Trailing key/value record (CSV comment lines or a "summary" JSON object).
    void summary(const std::vector<std::pair<std::string, Cell>>& fields);

private:
    void write(const std::string& s);
    Format format_;
    std::string command_;
    std::vector<std::string> columns_;
    std::string header_json_;
    std::FILE* file_ = nullptr;
    bool owned_ = false;
};

/// Runs fn(i) for i in [0, n) on `threads` workers; results are indexed so the
/// output order does not depend on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

std::vector<double> linspace(double lo, double hi, int n);

int cmd_thresholds(const RunConfig& cfg);
int cmd_crests(const RunConfig& cfg);
int cmd_portrait(const RunConfig& cfg);
int cmd_tau_field(const RunConfig& cfg);
int cmd_inner_portrait(const RunConfig& cfg);
int cmd_diffuse(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);

}  // namespace pendrot::cli
