#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsl {

// Streaming JSON writer with caller-controlled field order and floats
// rendered at 17 significant digits, so equal doubles always serialize to
// equal bytes.
class JsonWriter {
  public:
    std::string str() const { return out_; }

    JsonWriter& begin_object() { return token("{", false); }
    JsonWriter& end_object() { return close("}"); }
    JsonWriter& begin_array() { return token("[", false); }
    JsonWriter& end_array() { return close("]"); }

    JsonWriter& key(const std::string& name) {
        separate();
        out_ += '"';
        escape(name);
        out_ += "\": ";
        pending_value_ = true;
        return *this;
    }

    JsonWriter& value(double x) { return raw(format_double(x)); }
    JsonWriter& value(int x) { return raw(std::to_string(x)); }
    JsonWriter& value(std::int64_t x) { return raw(std::to_string(x)); }
    JsonWriter& value(std::uint64_t x) { return raw(std::to_string(x)); }
    JsonWriter& value(bool b) { return raw(b ? "true" : "false"); }
    JsonWriter& null() { return raw("null"); }
    JsonWriter& value(const std::string& s) {
        separate();
        out_ += '"';
        escape(s);
        out_ += '"';
        return *this;
    }
    JsonWriter& value(const char* s) { return value(std::string(s)); }

    template <typename T>
    JsonWriter& array(const std::vector<T>& xs) {
        begin_array();
        for (const auto& x : xs) value(x);
        return end_array();
    }

    static std::string format_double(double x) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    }

  private:
    JsonWriter& raw(const std::string& tok) {
        separate();
        out_ += tok;
        return *this;
    }

    JsonWriter& token(const char* open, bool) {
        separate();
        out_ += open;
        fresh_.push_back(true);
        return *this;
    }

    JsonWriter& close(const char* c) {
        if (fresh_.empty()) throw std::logic_error("JsonWriter: unbalanced close");
        fresh_.pop_back();
        out_ += c;
        return *this;
    }

    void separate() {
        if (pending_value_) {
            pending_value_ = false;
            return;
        }
        if (!fresh_.empty()) {
            if (!fresh_.back())
                out_ += ", ";
            else
                fresh_.back() = false;
        }
    }

    void escape(const std::string& s) {
        for (char c : s) {
            switch (c) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                default: out_ += c;
            }
        }
    }

    std::string out_;
    std::vector<bool> fresh_;
    bool pending_value_ = false;
};

} // namespace nsl
