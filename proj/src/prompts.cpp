#include "planforge/prompts.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace planforge::prompts {

namespace {

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

PromptTemplate::PromptTemplate(std::string name, std::string body, std::set<std::string> required)
    : name_(std::move(name)), body_(std::move(body)), required_(std::move(required)) {}

std::string PromptTemplate::render(const std::map<std::string, std::string>& bindings) const {
    for (const auto& req : required_) {
        if (!bindings.count(req)) {
            throw TemplateError("template '" + name_ + "': required placeholder '" + req +
                                "' is unbound");
        }
    }
    std::string out;
    out.reserve(body_.size());
    for (size_t i = 0; i < body_.size(); ++i) {
        if (body_[i] == '{') {
            size_t j = i + 1;
            while (j < body_.size() && is_ident_char(body_[j])) ++j;
            if (j > i + 1 && j < body_.size() && body_[j] == '}') {
                const std::string key = body_.substr(i + 1, j - i - 1);
                auto it = bindings.find(key);
                if (it == bindings.end()) {
                    throw TemplateError("template '" + name_ + "': placeholder '" + key +
                                        "' is unbound");
                }
                out += it->second;
                i = j;
                continue;
            }
        }
        out += body_[i];
    }
    return out;
}

namespace {

const char* kConstraintBody =
    "You are an expert in understanding an input problem and generating set of constraints. "
    "Analyze the input problem and extract all relevant instance-specific constraints and "
    "contextual details necessary for accurate and feasible planning.\n"
    "{constraint_types}"
    "\n"
    "Input Problem: {problem}\n";

const char* kVerificationBody =
    "Provide a reward score between -100 and 100 for the quality of the provided plan steps, "
    "using strict evaluation standards. Ensure the reward reflects how effectively the plan "
    "contributes to progressing toward the correct solution.\n"
    "\n"
    "Problem Statement:\n"
    "\n"
    "{problem}\n"
    "\n"
    "Plan:\n"
    "\n"
    "{plan}\n"
    "\n"
    "Consider the following constraints while evaluating:\n"
    "\n"
    "{constraints}\n"
    "\n"
    "Provide feedback in the following format:\n"
    "\n"
    "[Step-by-step reasoning for the reward score]\n"
    "\n"
    "Score: [Strictly provide an integer reward score between -100 and 100]\n";

const char* kSelectionBody =
    "Analyze the following planning problem and explain your reasoning for assigning priority "
    "scores to the algorithms based on their suitability. Scores should be between 0 and 1, "
    "where 1 represents the most suitable algorithm for the given problem.\n"
    "\n"
    "Problem Statement: {problem}\n"
    "\n"
    "Requirements: {requirements}\n"
    "\n"
    "Context: {context}\n"
    "\n"
    "Start by providing a brief reasoning for each algorithm's suitability based on problem "
    "complexity. Then, ONLY output your response strictly as a list with the exact format "
    "below:\n"
    "\n"
    "Reasoning:\n"
    "- Best of N: [Explain why this algorithm is or isn't suitable]\n"
    "- Rebase: [Explain why this algorithm is or isn't suitable]\n"
    "- ToT: [Explain why this algorithm is or isn't suitable]\n"
    "\n"
    "Scores:\n"
    "[(\"Best of N\", float),\n"
    "(\"Rebase\", float),\n"
    "(\"ToT\", float)]\n";

const char* kStepBody =
    "You are an expert assistant for generating step-by-step plan to solve a given question "
    "using specified tools. Given the problem and any intermediate steps, output only the next "
    "step in the plan. Ensure that the next action helps in moving toward the correct plan to "
    "solve the given question. Do not provide the full plan. Keep responses concise, focusing "
    "solely on the immediate next step that is most effective in progressing toward the "
    "correct plan.\n"
    "\n"
    "<problem>\n"
    "{problem}\n"
    "</problem>\n"
    "\n"
    "<intermediate_step>\n"
    "{intermediate_steps}\n"
    "</intermediate_step>\n";

const char* kCompletionBody =
    "You are an assistant tasked with verifying if the final, complete plan to solve the given "
    "question has been achieved within the intermediate steps. Output only '1' if the "
    "intermediate steps contain the full solution needed to solve the question. If the full "
    "plan has not yet been reached, output only '0'. Provide no additional commentary - return "
    "exclusively '1' or '0'.\n"
    "\n"
    "<problem>\n"
    "{problem}\n"
    "</problem>\n"
    "\n"
    "<intermediate_step>\n"
    "{intermediate_steps}\n"
    "</intermediate_step>\n";

const char* kReflectionBody =
    "You are an intelligent assistant capable of self-reflection and refinement. I will "
    "provide you with your last response, and your task is to improve it, if necessary.\n"
    "\n"
    "Here is your previous response:\n"
    "\n"
    "{previous_response}\n"
    "\n"
    "Analyze and refine your response step-by-step:\n"
    "\n"
    "1. Reflect on your reasoning process. Where might it be unclear or incorrect? Improve it.\n"
    "\n"
    "2. Revise the explanation to address any identified issues and make it more logical and "
    "comprehensive.\n"
    "\n"
    "3. Ensure the final answer is correct, supported by clear reasoning.\n";

const char* kInitialPlanBody =
    "{task_description}\n"
    "\n"
    "{statement}\n"
    "\n"
    "{context}"
    "Generate a complete, step-by-step plan that solves the problem above. Follow any "
    "formatting instructions given in the problem.\n";

const char* kExecutionBody =
    "You are given a problem and a plan that solves it. Carry out the plan step by step, "
    "showing the work for each step, and then state the final answer on a new line starting "
    "with 'Answer:'.\n"
    "\n"
    "Problem:\n"
    "\n"
    "{problem}\n"
    "\n"
    "Plan:\n"
    "\n"
    "{plan}\n";

const char* kZeroShotBody =
    "{task_description}\n"
    "\n"
    "{statement}\n"
    "\n"
    "Think through the problem step by step, then state the final answer.\n";

}  // namespace

PromptLibrary::PromptLibrary() {
    set(TemplateNames::kConstraint,
        PromptTemplate(TemplateNames::kConstraint, kConstraintBody, {"problem", "constraint_types"}));
    set(TemplateNames::kVerification,
        PromptTemplate(TemplateNames::kVerification, kVerificationBody,
                       {"problem", "plan", "constraints"}));
    set(TemplateNames::kSelection,
        PromptTemplate(TemplateNames::kSelection, kSelectionBody,
                       {"problem", "requirements", "context"}));
    set(TemplateNames::kStep,
        PromptTemplate(TemplateNames::kStep, kStepBody, {"problem", "intermediate_steps"}));
    set(TemplateNames::kCompletion,
        PromptTemplate(TemplateNames::kCompletion, kCompletionBody,
                       {"problem", "intermediate_steps"}));
    set(TemplateNames::kReflection,
        PromptTemplate(TemplateNames::kReflection, kReflectionBody, {"previous_response"}));
    set(TemplateNames::kInitialPlan,
        PromptTemplate(TemplateNames::kInitialPlan, kInitialPlanBody,
                       {"task_description", "statement", "context"}));
    set(TemplateNames::kExecution,
        PromptTemplate(TemplateNames::kExecution, kExecutionBody, {"problem", "plan"}));
    set(TemplateNames::kZeroShot,
        PromptTemplate(TemplateNames::kZeroShot, kZeroShotBody,
                       {"task_description", "statement"}));
}

const PromptTemplate& PromptLibrary::get(const std::string& slot) const {
    auto it = templates_.find(slot);
    if (it == templates_.end()) throw ConfigError("unknown prompt slot: " + slot);
    return it->second;
}

void PromptLibrary::set(const std::string& slot, PromptTemplate t) {
    templates_[slot] = std::move(t);
}

void PromptLibrary::override_from_file(const std::string& slot, const std::string& path) {
    auto it = templates_.find(slot);
    if (it == templates_.end()) throw ConfigError("unknown prompt slot: " + slot);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read prompt file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    it->second = PromptTemplate(slot, ss.str(), it->second.required_placeholders());
}

}  // namespace planforge::prompts
