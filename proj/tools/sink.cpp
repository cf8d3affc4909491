#include <cerrno>
#include <cstring>
#include <cmath>
#include <json.hpp>

#include "cli.hpp"
#include "pendrot/error.hpp"

namespace pendrot::cli {

namespace {

constexpr int kSchemaVersion = 1;

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) return std::isfinite(v) ? format_double(v) : "null";
            else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
            else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
            else return json_string(v);
        },
        c);
}

std::string csv_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) return format_double(v);
            else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
            else if constexpr (std::is_same_v<T, bool>) return v ? "1" : "0";
            else {
                if (v.find_first_of(",\"\n") == std::string::npos) return v;
                std::string q = "\"";
                for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
                return q + "\"";
            }
        },
        c);
}

}  // namespace

Sink::Sink(const RunConfig& cfg, const Resolved& res, std::string command, std::vector<std::string> columns)
    : format_(cfg.format), command_(std::move(command)), columns_(std::move(columns)) {
    if (cfg.out.empty() || cfg.out == "-") {
        file_ = stdout;
    } else {
        file_ = std::fopen(cfg.out.c_str(), "w");
        if (!file_) throw Error(ErrorCode::InvalidParams, "cannot open " + cfg.out + ": " + std::strerror(errno));
        owned_ = true;
    }
    if (format_ == Format::Csv) {
        std::string head = "# schema_version: " + std::to_string(kSchemaVersion) + "\n";
        for (const auto& [k, v] : res.header) head += "# " + k + ": " + v + "\n";
        for (std::size_t i = 0; i < columns_.size(); ++i) head += (i ? "," : "") + columns_[i];
        write(head + "\n");
    } else {
        header_json_ = "{";
        bool first = true;
        for (const auto& [k, v] : res.header) {
            if (k == "override") continue;
            header_json_ += (first ? "" : ",") + json_string(k) + ":" + json_string(v);
            first = false;
        }
        std::string ov = "[";
        bool f2 = true;
        for (const auto& [k, v] : res.header) {
            if (k != "override") continue;
            ov += (f2 ? "" : ",") + json_string(v);
            f2 = false;
        }
        header_json_ += std::string(first ? "" : ",") + "\"overrides\":" + ov + "]}";
    }
}

Sink::~Sink() {
    if (owned_) std::fclose(file_);
    else std::fflush(file_);
}

void Sink::write(const std::string& s) {
    if (std::fwrite(s.data(), 1, s.size(), file_) != s.size()) {
        throw Error(ErrorCode::InvalidParams, "write failed");
    }
}

void Sink::row(const std::vector<Cell>& cells) {
    std::string line;
    if (format_ == Format::Csv) {
        for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + csv_cell(cells[i]);
    } else {
        line = "{\"schema_version\":" + std::to_string(kSchemaVersion) + ",\"record\":\"row\",\"params\":" +
               header_json_;
        for (std::size_t i = 0; i < cells.size() && i < columns_.size(); ++i)
            line += "," + json_string(columns_[i]) + ":" + json_cell(cells[i]);
        line += "}";
    }
    write(line + "\n");
}

void Sink::summary(const std::vector<std::pair<std::string, Cell>>& fields) {
    std::string out;
    if (format_ == Format::Csv) {
        for (const auto& [k, v] : fields) out += "# " + k + ": " + csv_cell(v) + "\n";
    } else {
        out = "{\"schema_version\":" + std::to_string(kSchemaVersion) + ",\"record\":\"summary\",\"params\":" +
              header_json_;
        for (const auto& [k, v] : fields) out += "," + json_string(k) + ":" + json_cell(v);
        out += "}\n";
    }
    write(out);
}

}  // namespace pendrot::cli
