#ifndef MAGJAC_REPORT_HPP
#define MAGJAC_REPORT_HPP

#include <memory>
#include <string>
#include <vector>

#include "magjac/comparison.hpp"
#include "magjac/linalg.hpp"
#include "magjac/rootscan.hpp"

namespace magjac {

/// Minimal JSON document with insertion-ordered object keys and fixed float
/// formatting (17 significant digits), so identical inputs serialize to
/// byte-identical output.
class Json {
public:
    Json() = default;
    static Json object();
    static Json array();
    static Json number(double v);
    static Json integer(long v);
    static Json boolean(bool v);
    static Json string(std::string v);

    Json& set(const std::string& key, Json v);  // object member, insertion order
    Json& push(Json v);                         // array element

    std::string dump(int indent = 2) const;

    // convenience builders
    static Json of(const Vec& v);
    static Json of(const Mat& m);
    static Json of(const ConjugateReport& r);
    static Json of(const ComparisonVerdict& v);

private:
    enum class Type { Null, Bool, Int, Double, String, Array, Object };
    Type type_ = Type::Null;
    bool b_ = false;
    long i_ = 0;
    double d_ = 0.0;
    std::string s_;
    std::vector<Json> arr_;
    std::vector<std::pair<std::string, Json>> obj_;

    void write(std::string& out, int indent, int depth) const;
};

/// Format one double with 17 significant digits (the project-wide convention
/// for every numeric artifact).
std::string format_number(double v);

void write_text_file(const std::string& path, const std::string& content);

/// Write a CSV file: header row then columns of equal length, numbers in the
/// fixed 17-significant-digit format.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

} // namespace magjac

#endif
