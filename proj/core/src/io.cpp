#include "ergo/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ergo {

namespace {

// SAX handler that materializes a RawJson tree, keeping every number's raw
// literal text. Containers are closed by value, so no pointers into growing
// vectors are held.
class RawSax {
  public:
    using json = nlohmann::json;
    using number_integer_t = json::number_integer_t;
    using number_unsigned_t = json::number_unsigned_t;
    using number_float_t = json::number_float_t;
    using string_t = json::string_t;
    using binary_t = json::binary_t;

    RawJson take_root() { return std::move(root_); }

    bool null() {
        RawJson v;
        v.type = RawJson::Type::Null;
        return attach(std::move(v));
    }
    bool boolean(bool b) {
        RawJson v;
        v.type = RawJson::Type::Boolean;
        v.boolean = b;
        return attach(std::move(v));
    }
    bool number_integer(number_integer_t n) { return number_text(std::to_string(n)); }
    bool number_unsigned(number_unsigned_t n) { return number_text(std::to_string(n)); }
    bool number_float(number_float_t, const string_t& raw) { return number_text(raw); }
    bool string(string_t& s) {
        RawJson v;
        v.type = RawJson::Type::String;
        v.text = s;
        return attach(std::move(v));
    }
    bool binary(binary_t&) { throw ParseError("binary values are not part of the schema"); }
    bool start_object(std::size_t) {
        Frame f;
        f.node.type = RawJson::Type::Object;
        frames_.push_back(std::move(f));
        return true;
    }
    bool key(string_t& k) {
        frames_.back().key = k;
        return true;
    }
    bool end_object() { return close(); }
    bool start_array(std::size_t) {
        Frame f;
        f.node.type = RawJson::Type::Array;
        frames_.push_back(std::move(f));
        return true;
    }
    bool end_array() { return close(); }
    bool parse_error(std::size_t position, const std::string& token, const nlohmann::detail::exception& ex) {
        throw ParseError("JSON parse error near byte " + std::to_string(position) + " (token \"" + token +
                         "\"): " + ex.what());
    }

  private:
    struct Frame {
        RawJson node;
        std::string key;
    };

    bool number_text(std::string text) {
        RawJson v;
        v.type = RawJson::Type::Number;
        v.text = std::move(text);
        return attach(std::move(v));
    }

    bool attach(RawJson&& v) {
        if (frames_.empty()) {
            root_ = std::move(v);
            return true;
        }
        Frame& top = frames_.back();
        if (top.node.type == RawJson::Type::Array)
            top.node.items.push_back(std::move(v));
        else
            top.node.members.emplace_back(std::move(top.key), std::move(v));
        return true;
    }

    bool close() {
        RawJson done = std::move(frames_.back().node);
        frames_.pop_back();
        return attach(std::move(done));
    }

    RawJson root_;
    std::vector<Frame> frames_;
};

}  // namespace

RawJson parse_raw_json(const std::string& text) {
    RawSax sax;
    if (!nlohmann::json::sax_parse(text, &sax)) throw ParseError("JSON parsing failed");
    return sax.take_root();
}

RawJson parse_raw_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_raw_json(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace ergo
