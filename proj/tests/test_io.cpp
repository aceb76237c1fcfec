#include <doctest.h>

#include <sstream>

#include "mmdkit/io.hpp"

using namespace mmdkit;

namespace {

Sample from_string(const std::string& text, CsvOptions opt = {}) {
    std::istringstream in(text);
    return parse_csv(in, opt, "test");
}

}  // namespace

TEST_CASE("parse_csv basics") {
    const Sample s = from_string("1,2\n3,4\n");
    CHECK(s.size() == 2);
    CHECK(s.dim() == 2);
    CHECK(s.points(0, 0) == 1.0);
    CHECK(s.points(1, 1) == 4.0);

    const Sample single = from_string("3.5\n");
    CHECK(single.size() == 1);
    CHECK(single.dim() == 1);

    // CRLF and blank lines tolerated
    const Sample crlf = from_string("1,2\r\n\r\n3,4\r\n");
    CHECK(crlf.size() == 2);

    // scientific notation and negatives
    const Sample sci = from_string("-1e-3,2.5E2\n");
    CHECK(sci.points(0, 0) == -1e-3);
    CHECK(sci.points(0, 1) == 250.0);
}

TEST_CASE("parse_csv header handling") {
    CsvOptions opt;
    opt.has_header = true;
    const Sample s = from_string("a,b\n1,2\n3,4\n", opt);
    CHECK(s.size() == 2);
    CHECK(s.dim() == 2);
}

TEST_CASE("parse_csv delimiter option") {
    CsvOptions opt;
    opt.delimiter = ';';
    const Sample s = from_string("1;2\n3;4\n", opt);
    CHECK(s.dim() == 2);
}

TEST_CASE("parse_csv errors") {
    CHECK_THROWS_WITH_AS((void)from_string(""), doctest::Contains("empty input"), std::runtime_error);
    CHECK_THROWS_WITH_AS((void)from_string("\n\n"), doctest::Contains("empty input"),
                         std::runtime_error);

    // ragged rows name the offending row
    CHECK_THROWS_WITH_AS((void)from_string("1,2\n3\n"), doctest::Contains("row 2"),
                         std::runtime_error);

    // non-numeric cells name row and column
    CHECK_THROWS_WITH_AS((void)from_string("1,x\n"), doctest::Contains("column 2"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS((void)from_string("1,\n"), doctest::Contains("not numeric"),
                         std::runtime_error);

    CHECK_THROWS_WITH_AS((void)parse_csv("/nonexistent/path.csv"), doctest::Contains("cannot open"),
                         std::runtime_error);
}

TEST_CASE("parse_gram_csv wants a square matrix") {
    // exercised through a temp file
    const std::string path = "/tmp/mmdkit_test_gram.csv";
    {
        std::ofstream out(path);
        out << "1,0.5\n0.5,1\n";
    }
    const Matrix g = parse_gram_csv(path);
    CHECK(g.rows() == 2);
    CHECK(g(0, 1) == 0.5);
    {
        std::ofstream out(path);
        out << "1,0.5\n";
    }
    CHECK_THROWS_WITH_AS((void)parse_gram_csv(path), doctest::Contains("square"), std::runtime_error);
}
