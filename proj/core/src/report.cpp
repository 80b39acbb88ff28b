#include "magjac/report.hpp"

#include <cstdio>
#include <fstream>

#include "magjac/errors.hpp"

namespace magjac {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Json Json::object() {
    Json j;
    j.type_ = Type::Object;
    return j;
}
Json Json::array() {
    Json j;
    j.type_ = Type::Array;
    return j;
}
Json Json::number(double v) {
    Json j;
    j.type_ = Type::Double;
    j.d_ = v;
    return j;
}
Json Json::integer(long v) {
    Json j;
    j.type_ = Type::Int;
    j.i_ = v;
    return j;
}
Json Json::boolean(bool v) {
    Json j;
    j.type_ = Type::Bool;
    j.b_ = v;
    return j;
}
Json Json::string(std::string v) {
    Json j;
    j.type_ = Type::String;
    j.s_ = std::move(v);
    return j;
}

Json& Json::set(const std::string& key, Json v) {
    if (type_ != Type::Object) throw Error("Json::set on a non-object");
    obj_.emplace_back(key, std::move(v));
    return *this;
}

Json& Json::push(Json v) {
    if (type_ != Type::Array) throw Error("Json::push on a non-array");
    arr_.push_back(std::move(v));
    return *this;
}

namespace {

void write_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    out += '"';
}

} // namespace

void Json::write(std::string& out, int indent, int depth) const {
    const std::string pad(indent * (depth + 1), ' ');
    const std::string pad_close(indent * depth, ' ');
    switch (type_) {
        case Type::Null: out += "null"; break;
        case Type::Bool: out += b_ ? "true" : "false"; break;
        case Type::Int: out += std::to_string(i_); break;
        case Type::Double: out += format_number(d_); break;
        case Type::String: write_escaped(out, s_); break;
        case Type::Array: {
            if (arr_.empty()) {
                out += "[]";
                break;
            }
            out += "[\n";
            for (std::size_t i = 0; i < arr_.size(); ++i) {
                out += pad;
                arr_[i].write(out, indent, depth + 1);
                if (i + 1 < arr_.size()) out += ',';
                out += '\n';
            }
            out += pad_close + "]";
            break;
        }
        case Type::Object: {
            if (obj_.empty()) {
                out += "{}";
                break;
            }
            out += "{\n";
            for (std::size_t i = 0; i < obj_.size(); ++i) {
                out += pad;
                write_escaped(out, obj_[i].first);
                out += ": ";
                obj_[i].second.write(out, indent, depth + 1);
                if (i + 1 < obj_.size()) out += ',';
                out += '\n';
            }
            out += pad_close + "}";
            break;
        }
    }
}

std::string Json::dump(int indent) const {
    std::string out;
    write(out, indent, 0);
    out += '\n';
    return out;
}

Json Json::of(const Vec& v) {
    Json a = array();
    for (int i = 0; i < v.size(); ++i) a.push(number(v[i]));
    return a;
}

Json Json::of(const Mat& m) {
    Json a = array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = array();
        for (int j = 0; j < m.cols(); ++j) row.push(number(m(i, j)));
        a.push(std::move(row));
    }
    return a;
}

Json Json::of(const ConjugateReport& r) {
    Json j = object();
    j.set("method", string(r.method));
    j.set("T", number(r.T));
    j.set("count", integer(r.count()));
    Json ev = array();
    for (const auto& e : r.events) {
        Json one = object();
        one.set("t", number(e.t));
        one.set("multiplicity", integer(e.multiplicity));
        ev.push(std::move(one));
    }
    j.set("events", std::move(ev));
    return j;
}

Json Json::of(const ComparisonVerdict& v) {
    Json j = object();
    j.set("lower", integer(v.lower));
    j.set("observed", integer(v.observed));
    j.set("upper", integer(v.upper));
    j.set("pass", boolean(v.pass));
    Json b = object();
    b.set("n", integer(v.bounds.n));
    b.set("u0bar", number(v.bounds.u0bar));
    b.set("curv_b", Json::array().push(number(v.bounds.cb)).push(number(v.bounds.Cb)));
    b.set("curv_c", Json::array().push(number(v.bounds.cc)).push(number(v.bounds.Cc)));
    b.set("q_b", Json::array().push(number(v.bounds.kb)).push(number(v.bounds.Kb)));
    b.set("q_c", Json::array().push(number(v.bounds.kc)).push(number(v.bounds.Kc)));
    b.set("empirical", boolean(v.bounds.empirical));
    b.set("omega_lower", Json::array().push(number(v.bounds.omega_b_lower())).push(number(v.bounds.omega_c_lower())));
    b.set("omega_upper", Json::array().push(number(v.bounds.omega_b_upper())).push(number(v.bounds.omega_c_upper())));
    j.set("bounds", std::move(b));
    Json cc = array();
    for (const auto& c : v.corollary) {
        Json one = object();
        one.set("check", string(c.description));
        one.set("applicable", boolean(c.applicable));
        one.set("satisfied", boolean(c.satisfied));
        one.set("bound_time", number(c.bound_time));
        one.set("required_count", integer(c.required_count));
        cc.push(std::move(one));
    }
    j.set("interval_checks", std::move(cc));
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << content;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    if (columns.empty() || header.size() != columns.size())
        throw Error("write_csv: header/column mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    for (std::size_t j = 0; j < header.size(); ++j)
        out << header[j] << (j + 1 < header.size() ? "," : "\n");
    const std::size_t rows = columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows) throw Error("write_csv: ragged columns");
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < columns.size(); ++j)
            out << format_number(columns[j][i]) << (j + 1 < columns.size() ? "," : "\n");
}

} // namespace magjac
