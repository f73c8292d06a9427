#include "planforge/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace planforge::dataset {

std::vector<DatasetRecord> parse_jsonl(const std::string& content) {
    std::vector<DatasetRecord> records;
    std::set<std::string> seen_ids;
    std::istringstream in(content);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = line;
        if (!stripped.empty() && stripped.back() == '\r') stripped.pop_back();
        bool blank = true;
        for (char c : stripped) {
            if (!std::isspace(static_cast<unsigned char>(c))) {
                blank = false;
                break;
            }
        }
        if (blank) continue;

        DatasetRecord rec;
        rec.raw_line = stripped;
        try {
            rec.problem = json::parse(stripped).get<PlanningProblem>();
        } catch (const json::exception& e) {
            throw DatasetError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (rec.problem.id.empty()) {
            throw DatasetError("line " + std::to_string(line_no) + ": empty id");
        }
        if (rec.problem.statement.empty()) {
            throw DatasetError("line " + std::to_string(line_no) + ": empty statement");
        }
        if (!seen_ids.insert(rec.problem.id).second) {
            throw DatasetError("line " + std::to_string(line_no) + ": duplicate id '" +
                               rec.problem.id + "'");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<DatasetRecord> load_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open dataset: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_jsonl(ss.str());
}

PlanningProblem load_problem_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open problem file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DatasetError(std::string("problem file parse: ") + e.what());
    }
    return j.get<PlanningProblem>();
}

}  // namespace planforge::dataset
