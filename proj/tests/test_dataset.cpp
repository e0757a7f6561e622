#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <zlib.h>

#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "kddbench/census.hpp"
#include "kddbench/error.hpp"
#include "kddbench/record_reader.hpp"
#include "synth.hpp"

using namespace kdd;
using testsupport::kdd_schema;

namespace {

// A minimal valid line: zeros in numeric columns, first domain symbol in
// nominal ones. Individual fields are then patched per test.
std::vector<std::string> base_fields(const FeatureSchema& schema) {
    std::vector<std::string> fields;
    for (const auto& col : schema.columns()) {
        fields.push_back(col.kind == ColumnKind::Numeric ? "0" : col.domain.front());
    }
    return fields;
}

std::string join_line(std::vector<std::string> fields, const std::string& label) {
    std::string line;
    for (const auto& f : fields) {
        line += f;
        line += ',';
    }
    line += label;
    return line;
}

std::vector<ConnectionRecord> parse_text(const std::string& text,
                                         RecordReader::OnError policy = RecordReader::OnError::Abort,
                                         ParseStats* stats = nullptr) {
    MemorySource source(text);
    RecordReader reader(source, kdd_schema(), policy);
    std::vector<ConnectionRecord> records;
    ConnectionRecord rec;
    while (reader.next(rec)) records.push_back(rec);
    if (stats != nullptr) *stats = reader.stats();
    return records;
}

}  // namespace

TEST_CASE("shipped schema has 41 columns with the expected nominal trio") {
    const FeatureSchema& schema = kdd_schema();
    CHECK(schema.feature_count() == 41);
    CHECK(schema.numeric_count() == 38);
    CHECK(schema.nominal_count() == 3);
    std::vector<std::string> nominal_names;
    for (const auto& col : schema.columns()) {
        if (col.kind == ColumnKind::Nominal) nominal_names.push_back(col.name);
    }
    CHECK(nominal_names == std::vector<std::string>{"protocol_type", "service", "flag"});
    CHECK(schema.columns().front().name == "duration");
    CHECK(schema.columns().back().name == "dst_host_srv_rerror_rate");
    // stable across loads
    CHECK(schema.digest() == kdd_schema().digest());
}

TEST_CASE("schema with wrong arity or duplicate names is rejected") {
    CHECK_THROWS_AS(parse_schema("a,numeric\nb,numeric\n"), SchemaError);
    std::string forty;
    for (int i = 0; i < 40; ++i) forty += "col" + std::to_string(i) + ",numeric\n";
    CHECK_THROWS_AS(parse_schema(forty), SchemaError);
    std::string duped;
    for (int i = 0; i < 40; ++i) duped += "col" + std::to_string(i) + ",numeric\n";
    duped += "col0,numeric\n";
    CHECK_THROWS_AS(parse_schema(duped), SchemaError);
    std::string empty_domain;
    for (int i = 0; i < 40; ++i) empty_domain += "col" + std::to_string(i) + ",numeric\n";
    empty_domain += "sym,nominal\n";
    CHECK_THROWS_AS(parse_schema(empty_domain), SchemaError);
}

TEST_CASE("trailing period on labels is stripped") {
    auto fields = base_fields(kdd_schema());
    fields[1] = "tcp";
    fields[2] = "http";
    fields[3] = "SF";
    fields[4] = "215";
    fields[5] = "45076";
    const auto records = parse_text(join_line(fields, "normal.") + "\n");
    REQUIRE(records.size() == 1);
    CHECK(records[0].label == "normal");
    CHECK(records[0].numeric[kdd_schema().slot_of(4)] == doctest::Approx(215.0));
}

TEST_CASE("empty input yields an empty stream with zero errors") {
    ParseStats stats;
    const auto records = parse_text("", RecordReader::OnError::Abort, &stats);
    CHECK(records.empty());
    CHECK(stats.lines == 0);
    CHECK(stats.skipped == 0);
}

TEST_CASE("wrong field count carries the line number") {
    std::string text = join_line(base_fields(kdd_schema()), "normal") + "\n";
    text += "0,tcp,http,SF\n";  // 4 fields
    MemorySource source(text);
    RecordReader reader(source, kdd_schema(), RecordReader::OnError::Abort);
    ConnectionRecord rec;
    CHECK(reader.next(rec));
    try {
        reader.next(rec);
        FAIL("expected RecordError");
    } catch (const RecordError& e) {
        CHECK(e.line_number == 2);
    }

    // skip-and-count policy continues past the bad line
    ParseStats stats;
    const auto records = parse_text(text + join_line(base_fields(kdd_schema()), "smurf") + "\n",
                                    RecordReader::OnError::Skip, &stats);
    CHECK(records.size() == 2);
    CHECK(stats.skipped == 1);
    CHECK(stats.last_error_line == 2);
}

TEST_CASE("non-numeric text in a numeric column is a record error") {
    auto fields = base_fields(kdd_schema());
    fields[0] = "abc";
    CHECK_THROWS_AS(parse_text(join_line(fields, "normal") + "\n"), RecordError);
    fields[0] = "1.2.3";
    CHECK_THROWS_AS(parse_text(join_line(fields, "normal") + "\n"), RecordError);
    fields[0] = "";
    CHECK_THROWS_AS(parse_text(join_line(fields, "normal") + "\n"), RecordError);
}

TEST_CASE("empty labels are rejected, separators in labels cannot appear") {
    CHECK_THROWS_AS(parse_text(join_line(base_fields(kdd_schema()), "") + "\n"), RecordError);
    CHECK_THROWS_AS(parse_text(join_line(base_fields(kdd_schema()), ".") + "\n"), RecordError);
    CHECK_THROWS_AS(parse_text(join_line(base_fields(kdd_schema()), "a,b") + "\n"), RecordError);
}

TEST_CASE("unseen nominal symbols map to the unseen index and are counted") {
    auto fields = base_fields(kdd_schema());
    fields[2] = "no_such_service";
    ParseStats stats;
    const auto records =
        parse_text(join_line(fields, "normal") + "\n", RecordReader::OnError::Abort, &stats);
    REQUIRE(records.size() == 1);
    CHECK(records[0].nominal[kdd_schema().slot_of(2)] == kdd_schema().unseen_index(2));
    CHECK(stats.unseen_symbols == 1);
}

TEST_CASE("numeric parsing accepts decimals and scientific notation") {
    auto fields = base_fields(kdd_schema());
    fields[0] = "1.5e2";
    fields[4] = "0.25";
    fields[5] = "-3";
    const auto records = parse_text(join_line(fields, "normal") + "\n");
    REQUIRE(records.size() == 1);
    CHECK(records[0].numeric[kdd_schema().slot_of(0)] == doctest::Approx(150.0));
    CHECK(records[0].numeric[kdd_schema().slot_of(4)] == doctest::Approx(0.25));
    CHECK(records[0].numeric[kdd_schema().slot_of(5)] == doctest::Approx(-3.0));
}

TEST_CASE("gzip sources decode transparently") {
    const std::string text = testsupport::synth_corpus({{"smurf", 50}, {"normal", 50}}, 7);
    const auto tmp = std::filesystem::temp_directory_path() / "kddbench_gz_test.data.gz";
    gzFile gz = gzopen(tmp.string().c_str(), "wb");
    REQUIRE(gz != nullptr);
    REQUIRE(gzwrite(gz, text.data(), static_cast<unsigned>(text.size())) ==
            static_cast<int>(text.size()));
    gzclose(gz);

    auto source = open_source(tmp.string());
    RecordReader reader(*source, kdd_schema(), RecordReader::OnError::Abort);
    const LabelCensus counts = census(reader);
    CHECK(counts.total == 100);
    CHECK(counts.counts.at("smurf") == 50);
    CHECK(counts.counts.at("normal") == 50);
    std::filesystem::remove(tmp);
}

TEST_CASE("round trip: serialize(parse(line)) reparses to an identical record") {
    Rng rng(2024);
    const FeatureSchema& schema = kdd_schema();
    std::string corpus;
    const std::vector<std::string> labels = {"smurf", "normal", "satan", "perl", "guess_passwd"};
    for (int i = 0; i < 1000; ++i) {
        corpus += testsupport::synth_kdd_line(rng, labels[i % labels.size()], schema);
        corpus += '\n';
    }
    const auto records = parse_text(corpus);
    REQUIRE(records.size() == 1000);
    std::string reserialized;
    for (const auto& r : records) {
        reserialized += serialize_record(r, schema);
        reserialized += '\n';
    }
    const auto again = parse_text(reserialized);
    REQUIRE(again.size() == records.size());
    CHECK(again == records);
}

TEST_CASE("round trip preserves the unseen sentinel") {
    auto fields = base_fields(kdd_schema());
    fields[3] = "NOT_A_FLAG";
    const auto records = parse_text(join_line(fields, "normal") + "\n");
    const std::string out = serialize_record(records[0], kdd_schema());
    const auto again = parse_text(out + "\n");
    CHECK(again == records);
}

TEST_CASE("census matches constructed fixtures") {
    std::string text;
    for (int i = 0; i < 3; ++i) text += join_line(base_fields(kdd_schema()), "smurf.") + "\n";
    for (int i = 0; i < 2; ++i) text += join_line(base_fields(kdd_schema()), "normal.") + "\n";
    MemorySource source(text);
    RecordReader reader(source, kdd_schema(), RecordReader::OnError::Abort);
    const LabelCensus counts = census(reader);
    CHECK(counts.counts.at("smurf") == 3);
    CHECK(counts.counts.at("normal") == 2);
    CHECK(counts.total == 5);

    MemorySource empty_source{std::string_view("")};
    RecordReader empty_reader(empty_source, kdd_schema(), RecordReader::OnError::Abort);
    const LabelCensus none = census(empty_reader);
    CHECK(none.counts.empty());
    CHECK(none.total == 0);
}

TEST_CASE("census is additive over stream concatenation") {
    Rng rng(99);
    std::vector<std::pair<std::string, std::uint64_t>> mix_a{{"smurf", 20}, {"nmap", 7}};
    std::vector<std::pair<std::string, std::uint64_t>> mix_b{{"smurf", 5}, {"normal", 11}};
    const std::string a = testsupport::synth_corpus(mix_a, 1);
    const std::string b = testsupport::synth_corpus(mix_b, 2);

    auto census_of = [](const std::string& text) {
        MemorySource source(text);
        RecordReader reader(source, kdd_schema(), RecordReader::OnError::Abort);
        return census(reader);
    };
    LabelCensus merged = census_of(a);
    merged.merge(census_of(b));
    const LabelCensus joint = census_of(a + b);
    CHECK(joint.counts == merged.counts);
    CHECK(joint.total == merged.total);
}

TEST_CASE("census CSV is sorted by descending count with a total line") {
    LabelCensus counts;
    counts.counts = {{"b", 5}, {"a", 9}, {"c", 5}};
    counts.total = 19;
    CHECK(census_to_csv(counts) == "label,count\na,9\nb,5\nc,5\ntotal,19\n");
}

TEST_CASE("parsing preserves file order") {
    std::string text;
    text += join_line(base_fields(kdd_schema()), "first") + "\n";
    text += join_line(base_fields(kdd_schema()), "second") + "\n";
    text += join_line(base_fields(kdd_schema()), "third") + "\n";
    const auto records = parse_text(text);
    REQUIRE(records.size() == 3);
    CHECK(records[0].label == "first");
    CHECK(records[1].label == "second");
    CHECK(records[2].label == "third");
}
