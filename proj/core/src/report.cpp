#include "ergo/io.hpp"

#include <sstream>

namespace ergo {

nlohmann::json RunReport::to_json() const {
    nlohmann::json out;
    out["command"] = command;
    out["mode"] = mode;
    out["inputs"] = inputs;
    out["outputs"] = outputs;
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [phase, ms] : timings_ms) t[phase] = ms;
    out["timings_ms"] = std::move(t);
    return out;
}

namespace {

void render_lines(const nlohmann::json& v, const std::string& prefix, std::ostream& os) {
    if (v.is_object()) {
        for (const auto& [k, sub] : v.items()) {
            std::string path = prefix.empty() ? k : prefix + "." + k;
            render_lines(sub, path, os);
        }
    } else if (v.is_array() && v.size() > 8) {
        os << "  " << prefix << ": [" << v.size() << " entries]\n";
    } else {
        os << "  " << prefix << ": " << v.dump() << "\n";
    }
}

}  // namespace

std::string RunReport::render_human() const {
    std::ostringstream os;
    os << command << " (" << mode << " mode)\n";
    render_lines(outputs, "", os);
    return os.str();
}

}  // namespace ergo
