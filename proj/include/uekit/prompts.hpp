#pragma once

#include <map>
#include <string>
#include <vector>

namespace uekit {

struct Message {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
  bool operator==(const Message&) const = default;
};

/// Named prompt templates. Defaults are compiled in from assets/prompts;
/// any template can be replaced from text or a file.
///
/// A template may contain a line "---USER---": text above it becomes the
/// system message, text below the user message. Without it the whole
/// template is one user message. Placeholders look like `{question}`.
class PromptSet {
 public:
  PromptSet();

  void set(const std::string& name, std::string text);
  void load_file(const std::string& name, const std::string& path);

  bool has(const std::string& name) const { return templates_.count(name) != 0; }
  const std::string& get(const std::string& name) const;
  std::vector<std::string> names() const;

  std::vector<Message> render(const std::string& name, const std::map<std::string, std::string>& fields) const;

 private:
  std::map<std::string, std::string> templates_;
};

inline constexpr const char* kUserSeparator = "---USER---";

}  // namespace uekit
