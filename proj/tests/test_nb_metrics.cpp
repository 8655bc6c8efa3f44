#include <doctest.h>

#include <cmath>

#include "nblens/nb_metrics.hpp"
#include "support.hpp"

using namespace nblens;
using testsupport::error_code_of;

namespace {

Cell code_cell(std::string source, std::optional<long> exec = std::nullopt,
               std::vector<OutputBundle> outputs = {}) {
    Cell c;
    c.kind = CellKind::Code;
    c.source = std::move(source);
    c.execution_count = exec;
    c.outputs = std::move(outputs);
    return c;
}

Cell markdown_cell(std::string source) {
    Cell c;
    c.kind = CellKind::Markdown;
    c.source = std::move(source);
    return c;
}

Notebook make_notebook(std::string id, std::vector<Cell> cells) {
    Notebook nb;
    nb.notebook_id = std::move(id);
    nb.format_major = 4;
    nb.cells = std::move(cells);
    return nb;
}

}  // namespace

TEST_CASE("coefficient_of_variation worked examples") {
    std::vector<double> flat = {5, 5, 5};
    CHECK(coefficient_of_variation(flat) == 0.0);

    std::vector<double> spread = {2, 4, 6};
    double expected = std::sqrt(8.0 / 3.0) / 4.0;
    CHECK(coefficient_of_variation(spread) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(coefficient_of_variation(spread) == doctest::Approx(0.408248).epsilon(1e-5));

    std::vector<double> single = {7};
    CHECK(coefficient_of_variation(single) == 0.0);
    std::vector<double> zeros = {0, 0, 0};
    CHECK(coefficient_of_variation(zeros) == 0.0);

    std::vector<double> negative = {1, -2};
    CHECK(error_code_of([&] { coefficient_of_variation(negative); }) == "NegativeInput");
}

TEST_CASE("structure_metrics over a mixed fixture") {
    OutputBundle image;
    image.output_type = "display_data";
    image.mime_keys = {"image/png", "text/plain"};
    Notebook nb = make_notebook("s", {
        code_cell("x = 1", 3),
        code_cell("plot(x)", std::nullopt, {image}),
        markdown_cell("# hi"),
    });
    auto m = structure_metrics(nb);
    CHECK(m.code_cells == 2);
    CHECK(m.executed_cells == 1);
    CHECK(m.visual_outputs == 1);
    CHECK(m.mean_lines_per_code_cell == doctest::Approx(1.0));

    auto empty = structure_metrics(make_notebook("e", {}));
    CHECK(empty.code_cells == 0);
    CHECK(empty.executed_cells == 0);
    CHECK(empty.visual_outputs == 0);
    CHECK(empty.imports == 0);
    CHECK(empty.mean_lines_per_code_cell == 0.0);
}

TEST_CASE("import counting follows the module-name rule") {
    Notebook nb = make_notebook("i", {code_cell("import a, b\nfrom c import d")});
    CHECK(structure_metrics(nb).imports == 3);

    CHECK(imported_modules("import numpy as np") == std::vector<std::string>{"numpy"});
    CHECK(imported_modules("import os.path, sys") == std::vector<std::string>{"os", "sys"});
    CHECK(imported_modules("from sklearn.linear_model import LogisticRegression") ==
          std::vector<std::string>{"sklearn"});
    CHECK(imported_modules("from . import util") == std::vector<std::string>{"."});
    CHECK(imported_modules("from .pkg import util") == std::vector<std::string>{"pkg"});
    CHECK(imported_modules("import a; import b") == std::vector<std::string>{"a", "b"});
    CHECK(imported_modules("x = 1\nprint(x)").empty());
    // a mention of the word import inside a string or call is not a statement
    CHECK(imported_modules("s = 'import fake'").empty());
}

TEST_CASE("non-visual output types do not count toward VDT") {
    OutputBundle text;
    text.output_type = "execute_result";
    text.mime_keys = {"text/plain", "text/html"};
    OutputBundle stream;
    stream.output_type = "stream";
    Notebook nb = make_notebook("v", {code_cell("x", 1, {text, stream})});
    CHECK(structure_metrics(nb).visual_outputs == 0);

    // configurable mime set
    std::set<std::string> custom = {"text/html"};
    CHECK(structure_metrics(nb, custom).visual_outputs == 1);
}

TEST_CASE("markdown_metrics worked examples") {
    Notebook nb = make_notebook("m", {markdown_cell("# Title\nsome words here")});
    auto m = markdown_metrics(nb);
    CHECK(m.markdown_cells == 1);
    CHECK(m.markdown_words == 4);
    CHECK(m.markdown_lines == 2);
    CHECK(m.h1 == 1);
    CHECK(m.h2 == 0);
    CHECK(m.h3 == 0);
    CHECK(m.mean_words_per_cell == doctest::Approx(4.0));
    CHECK(m.mean_lines_per_cell == doctest::Approx(2.0));

    auto none = markdown_metrics(make_notebook("n", {code_cell("x = 1")}));
    CHECK(none.markdown_cells == 0);
    CHECK(none.mean_words_per_cell == 0.0);

    auto deep = markdown_metrics(make_notebook("d", {markdown_cell("#### deep")}));
    CHECK(deep.h1 + deep.h2 + deep.h3 == 0);
}

TEST_CASE("heading rule boundaries") {
    auto level_of = [](std::string line) {
        auto m = markdown_metrics(make_notebook("h", {markdown_cell(std::move(line))}));
        if (m.h1) return 1;
        if (m.h2) return 2;
        if (m.h3) return 3;
        return 0;
    };
    CHECK(level_of("# one") == 1);
    CHECK(level_of("## two") == 2);
    CHECK(level_of("### three") == 3);
    CHECK(level_of("   ## indented") == 2);
    CHECK(level_of("    # four spaces") == 0);
    CHECK(level_of("#nospace") == 0);
    CHECK(level_of("text # not a heading") == 0);
}

TEST_CASE("dispersion_metrics worked examples") {
    Notebook even = make_notebook("e", {
        markdown_cell("a b c d e f g h i j"),
        markdown_cell("a b c d e f g h i j"),
        markdown_cell("a b c d e f g h i j"),
    });
    CHECK(dispersion_metrics(even).markdown_cv == 0.0);

    Notebook uneven = make_notebook("u", {
        markdown_cell("a b"),
        markdown_cell("a b c d"),
        markdown_cell("a b c d e f"),
    });
    CHECK(dispersion_metrics(uneven).markdown_cv == doctest::Approx(0.408248).epsilon(1e-5));

    Notebook bare = make_notebook("b", {code_cell("x = 1")});
    CHECK(dispersion_metrics(bare).markdown_cv == 0.0);
    CHECK(dispersion_metrics(make_notebook("c", {})).import_cv == 0.0);
}

TEST_CASE("dmc is scale invariant") {
    Notebook base = make_notebook("k", {
        markdown_cell("one two"),
        markdown_cell("one two three four five six"),
        markdown_cell("one two three"),
    });
    Notebook tripled = make_notebook("k3", {
        markdown_cell("one two one two one two"),
        markdown_cell("one two three four five six one two three four five six one two three four five six"),
        markdown_cell("one two three one two three one two three"),
    });
    CHECK(dispersion_metrics(base).markdown_cv ==
          doctest::Approx(dispersion_metrics(tripled).markdown_cv).epsilon(1e-12));
}

TEST_CASE("popularity table worked examples") {
    std::vector<Notebook> corpus;
    for (int i = 0; i < 4; ++i) {
        std::string source = "import m";
        if (i == 0) source += "\nimport r";
        corpus.push_back(make_notebook("nb" + std::to_string(i), {code_cell(source)}));
    }
    PopularityTable table = build_api_popularity(corpus);
    CHECK(table.corpus_size == 4);
    CHECK(table.scores.at("m") == doctest::Approx(1.0));
    CHECK(table.scores.at("r") == doctest::Approx(0.25));

    std::vector<Notebook> one = {make_notebook("solo", {code_cell("import numpy")})};
    CHECK(build_api_popularity(one).scores.at("numpy") == doctest::Approx(1.0));

    std::vector<Notebook> none;
    CHECK(error_code_of([&] { build_api_popularity(none); }) == "EmptyCorpus");
}

TEST_CASE("popularity counts a notebook once per module") {
    std::vector<Notebook> corpus = {
        make_notebook("a", {code_cell("import m\nimport m\nimport m")}),
        make_notebook("b", {code_cell("x = 1")}),
    };
    CHECK(build_api_popularity(corpus).scores.at("m") == doctest::Approx(0.5));
}

TEST_CASE("popularity merge is partition independent") {
    auto nb = [](std::string id, std::string src) {
        return make_notebook(std::move(id), {code_cell(std::move(src))});
    };
    std::vector<Notebook> corpus = {nb("1", "import a"), nb("2", "import b\nimport a"),
                                    nb("3", "import c"), nb("4", "import a")};
    PopularityBuilder whole;
    for (const auto& n : corpus) whole.add(n);

    PopularityBuilder left, right;
    left.add(corpus[0]);
    right.add(corpus[1]);
    right.add(corpus[2]);
    left.add(corpus[3]);
    PopularityBuilder merged;
    merged.merge(right);
    merged.merge(left);

    CHECK(whole.finalize().scores == merged.finalize().scores);
}

TEST_CASE("eap worked examples") {
    PopularityTable table;
    table.corpus_size = 4;
    table.scores = {{"m", 1.0}, {"r", 0.25}};

    Notebook both = make_notebook("x", {code_cell("import m\nimport r")});
    CHECK(eap(both, table) == doctest::Approx(1.25));

    Notebook none = make_notebook("y", {code_cell("x = 1")});
    CHECK(eap(none, table) == 0.0);

    Notebook unknown = make_notebook("z", {code_cell("import q")});
    CHECK(eap(unknown, table) == 0.0);

    // distinct modules: repeated imports add once
    Notebook repeated = make_notebook("w", {code_cell("import m"), code_cell("import m")});
    CHECK(eap(repeated, table) == doctest::Approx(1.0));
}

TEST_CASE("eap monotonicity under a new known import") {
    PopularityTable table;
    table.corpus_size = 2;
    table.scores = {{"m", 1.0}, {"extra", 0.5}};
    Notebook nb = make_notebook("x", {code_cell("import m")});
    double before = eap(nb, table);
    nb.cells.push_back(code_cell("import extra"));
    CHECK(eap(nb, table) >= before);
}

TEST_CASE("assemble_metric_vector basics") {
    PopularityTable table;
    table.corpus_size = 1;

    NotebookMetadata meta;
    meta.performance_tier = 2;
    MetricVector v = assemble_metric_vector(make_notebook("empty", {}), meta, table);
    auto vals = v.values();
    const auto& names = metric_names();
    REQUIRE(vals.size() == 34);
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (names[i] == "PT")
            CHECK(vals[i] == doctest::Approx(2.0));
        else
            CHECK(vals[i] == doctest::Approx(0.0));
    }

    NotebookMetadata bad;
    bad.performance_tier = 7;
    CHECK(error_code_of([&] {
              assemble_metric_vector(make_notebook("e", {}), bad, table);
          }) == "InvalidTier");
}

TEST_CASE("metric vector is always 34 wide and finite") {
    PopularityTable table;
    table.corpus_size = 1;
    NotebookMetadata meta;
    std::vector<Notebook> cases = {
        make_notebook("empty", {}),
        make_notebook("code", {code_cell("import a\nif a:\n    a.run()")}),
        make_notebook("md", {markdown_cell("# x\n\nwords")}),
    };
    for (const auto& nb : cases) {
        auto vals = assemble_metric_vector(nb, meta, table).values();
        REQUIRE(vals.size() == 34);
        for (double v : vals) CHECK(std::isfinite(v));
    }
}

TEST_CASE("permuting code between cells changes DI but not script totals") {
    Notebook together = make_notebook("t", {
        code_cell("import a\nimport b"),
        code_cell("x = a.f() + b.g()"),
    });
    Notebook spread = make_notebook("s", {
        code_cell("import a"),
        code_cell("import b\nx = a.f() + b.g()"),
    });
    PopularityTable table;
    table.corpus_size = 1;
    NotebookMetadata meta;
    MetricVector mt = assemble_metric_vector(together, meta, table);
    MetricVector ms = assemble_metric_vector(spread, meta, table);

    CHECK(mt.script.loc == ms.script.loc);
    CHECK(mt.script.operands == ms.script.operands);
    CHECK(mt.script.operators == ms.script.operators);
    CHECK(mt.script.identifiers == ms.script.identifiers);
    CHECK(mt.notebook.imports == ms.notebook.imports);
    // imports per cell: (2,0) vs (1,1)
    CHECK(mt.notebook.di != doctest::Approx(ms.notebook.di));
}

TEST_CASE("metric csv row renders integers bare and reals at 6 digits") {
    PopularityTable table;
    table.corpus_size = 1;
    NotebookMetadata meta;
    meta.performance_tier = 3;
    Notebook nb = make_notebook("fmt", {code_cell("xy = 1"), markdown_cell("# t\nw")});
    auto row = metric_csv_row(assemble_metric_vector(nb, meta, table));
    REQUIRE(row.size() == 35);
    CHECK(row[0] == "fmt");
    const auto& names = metric_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == "LOC") CHECK(row[i + 1] == "1");
        if (names[i] == "ALLC") CHECK(row[i + 1] == "6.000000");
        if (names[i] == "PT") CHECK(row[i + 1] == "3");
    }
}
