#include "uekit/prompts.hpp"

#include <fstream>
#include <sstream>

#include "uekit/errors.hpp"
#include "uekit/text.hpp"

namespace uekit {

namespace detail {
const std::map<std::string, std::string>& embedded_prompts();
}

PromptSet::PromptSet() : templates_(detail::embedded_prompts()) {}

void PromptSet::set(const std::string& name, std::string text) { templates_[name] = std::move(text); }

void PromptSet::load_file(const std::string& name, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read prompt file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  set(name, ss.str());
}

const std::string& PromptSet::get(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw Error("no prompt template named \"" + name + "\"");
  return it->second;
}

std::vector<std::string> PromptSet::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : templates_) out.push_back(k);
  return out;
}

std::vector<Message> PromptSet::render(const std::string& name,
                                       const std::map<std::string, std::string>& fields) const {
  const std::string& tmpl = get(name);
  auto sep = tmpl.find(kUserSeparator);
  if (sep == std::string::npos) return {{"user", text::trim(text::render(tmpl, fields))}};
  std::string sys = tmpl.substr(0, sep);
  std::string user = tmpl.substr(sep + std::string(kUserSeparator).size());
  return {{"system", text::trim(text::render(sys, fields))}, {"user", text::trim(text::render(user, fields))}};
}

}  // namespace uekit
