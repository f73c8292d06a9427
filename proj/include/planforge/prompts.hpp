#pragma once

#include <map>
#include <set>
#include <string>

#include "planforge/core.hpp"

namespace planforge::prompts {

/// A prompt body with {name} placeholders. Rendering binds every placeholder
/// appearing in the body and additionally demands every name listed in
/// required_placeholders; an unbound required placeholder is an error, never
/// a silent pass-through.
class PromptTemplate {
public:
    PromptTemplate() = default;
    PromptTemplate(std::string name, std::string body, std::set<std::string> required);

    const std::string& name() const { return name_; }
    const std::string& body() const { return body_; }
    const std::set<std::string>& required_placeholders() const { return required_; }

    std::string render(const std::map<std::string, std::string>& bindings) const;

private:
    std::string name_;
    std::string body_;
    std::set<std::string> required_;
};

/// Names every template slot used by the engine.
struct TemplateNames {
    static constexpr const char* kConstraint = "constraint";
    static constexpr const char* kVerification = "verification";
    static constexpr const char* kSelection = "selection";
    static constexpr const char* kStep = "step";
    static constexpr const char* kCompletion = "completion";
    static constexpr const char* kReflection = "reflection";
    static constexpr const char* kInitialPlan = "initial_plan";
    static constexpr const char* kExecution = "execution";
    static constexpr const char* kZeroShot = "zero_shot";
};

/// Holds the active template per slot. Starts from the built-in defaults;
/// individual slots can be replaced from plain-text files via config.
class PromptLibrary {
public:
    PromptLibrary();

    const PromptTemplate& get(const std::string& slot) const;
    void set(const std::string& slot, PromptTemplate t);
    /// Loads a replacement body from a file, keeping the slot's required set.
    void override_from_file(const std::string& slot, const std::string& path);

private:
    std::map<std::string, PromptTemplate> templates_;
};

}  // namespace planforge::prompts
