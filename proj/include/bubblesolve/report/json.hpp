#pragma once

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace bubblesolve::report {

// Minimal JSON document builder with insertion-ordered objects and fixed
// 17-significant-digit formatting of doubles, so identical runs serialize to
// identical bytes.
class Json {
  public:
    enum class Type { Null, Bool, Int, Num, Str, Array, Object };

    Json() : type_(Type::Null) {}
    static Json null() { return Json(); }
    Json(bool b) : type_(Type::Bool), bool_(b) {}
    Json(int v) : type_(Type::Int), int_(v) {}
    Json(long long v) : type_(Type::Int), int_(v) {}
    Json(double v) : type_(Type::Num), num_(v) {}
    Json(const char* s) : type_(Type::Str), str_(s) {}
    Json(std::string s) : type_(Type::Str), str_(std::move(s)) {}

    static Json array() {
        Json j;
        j.type_ = Type::Array;
        return j;
    }
    static Json object() {
        Json j;
        j.type_ = Type::Object;
        return j;
    }

    Json& push(Json v) {
        items_.push_back(std::move(v));
        return *this;
    }
    Json& set(const std::string& key, Json v) {
        fields_.emplace_back(key, std::move(v));
        return *this;
    }

    [[nodiscard]] std::string dump(int indent = 2) const {
        std::string out;
        write(out, indent, 0);
        out.push_back('\n');
        return out;
    }

  private:
    static std::string format_double(double v) {
        if (std::isnan(v)) return "\"nan\"";
        if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    static void escape(std::string& out, const std::string& s) {
        out.push_back('"');
        for (char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                        out += buf;
                    } else {
                        out.push_back(c);
                    }
            }
        }
        out.push_back('"');
    }

    void write(std::string& out, int indent, int depth) const {
        std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
        std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
        switch (type_) {
            case Type::Null: out += "null"; break;
            case Type::Bool: out += bool_ ? "true" : "false"; break;
            case Type::Int: out += std::to_string(int_); break;
            case Type::Num: out += format_double(num_); break;
            case Type::Str: escape(out, str_); break;
            case Type::Array: {
                if (items_.empty()) {
                    out += "[]";
                    break;
                }
                out += "[\n";
                for (std::size_t i = 0; i < items_.size(); ++i) {
                    out += pad;
                    items_[i].write(out, indent, depth + 1);
                    if (i + 1 < items_.size()) out.push_back(',');
                    out.push_back('\n');
                }
                out += close_pad + "]";
                break;
            }
            case Type::Object: {
                if (fields_.empty()) {
                    out += "{}";
                    break;
                }
                out += "{\n";
                for (std::size_t i = 0; i < fields_.size(); ++i) {
                    out += pad;
                    escape(out, fields_[i].first);
                    out += ": ";
                    fields_[i].second.write(out, indent, depth + 1);
                    if (i + 1 < fields_.size()) out.push_back(',');
                    out.push_back('\n');
                }
                out += close_pad + "}";
                break;
            }
        }
    }

    Type type_;
    bool bool_ = false;
    long long int_ = 0;
    double num_ = 0.0;
    std::string str_;
    std::vector<Json> items_;
    std::vector<std::pair<std::string, Json>> fields_;
};

inline Json from_vec(const std::vector<double>& v) {
    Json arr = Json::array();
    for (double x : v) arr.push(Json(x));
    return arr;
}

}  // namespace bubblesolve::report
