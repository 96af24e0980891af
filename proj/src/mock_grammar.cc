// Copyright 2026 The snipfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Sanitizers for the three mock grammars. Each parser records which input
// bytes belong to keys and scalar values so the lab can export per-byte
// ground truth for segmentation scoring.

#include <cctype>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "snipfuzz/mock_device.h"

namespace snipfuzz::mock {

namespace {

bool IsWhitespace(uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

// Length of a valid UTF-8 sequence starting at in[pos], or 0.
size_t Utf8Length(const ByteArray& in, size_t pos) {
  const uint8_t lead = in[pos];
  size_t extra = 0;
  if (lead >= 0xc2 && lead <= 0xdf) extra = 1;
  else if (lead >= 0xe0 && lead <= 0xef) extra = 2;
  else if (lead >= 0xf0 && lead <= 0xf4) extra = 3;
  else return 0;
  if (pos + extra >= in.size()) return 0;
  for (size_t i = 1; i <= extra; ++i) {
    if ((in[pos + i] & 0xc0) != 0x80) return 0;
  }
  return extra + 1;
}

// Strict JSON, with one deliberate hole: when a member value is a string
// that is itself followed by ':', the opening brace of an object was
// evidently dropped. Instead of rejecting the input, the parser collects the
// "key: value" pairs up to the next '}' into an array of one-member objects.
// Handlers that expect an object then see an array.
class JsonLikeParser {
 public:
  explicit JsonLikeParser(const ByteArray& in) : in_(in), mask_(in.size(), 0) {}

  std::optional<ParsedInput> Run() {
    SkipSpace();
    Value root;
    if (!ParseObject(root)) return std::nullopt;
    SkipSpace();
    if (pos_ != in_.size()) return std::nullopt;
    ParsedInput out;
    for (auto& [key, value] : root.members) {
      out.fields.push_back({key, std::move(value)});
    }
    out.data_mask = std::move(mask_);
    return out;
  }

 private:
  bool AtEnd() const { return pos_ >= in_.size(); }
  uint8_t Peek() const { return in_[pos_]; }
  void SkipSpace() {
    while (!AtEnd() && IsWhitespace(Peek())) ++pos_;
  }
  bool Consume(uint8_t c) {
    if (AtEnd() || Peek() != c) return false;
    ++pos_;
    return true;
  }
  void Mark(size_t from, size_t to) {
    for (size_t i = from; i < to; ++i) mask_[i] = 1;
  }

  bool ParseString(std::string& text) {
    if (!Consume('"')) return false;
    const size_t start = pos_;
    while (!AtEnd()) {
      const uint8_t c = Peek();
      if (c == '"') {
        text.assign(in_.begin() + start, in_.begin() + pos_);
        Mark(start, pos_);
        ++pos_;
        return true;
      }
      if (c < 0x20) return false;
      if (c == '\\') {
        if (pos_ + 1 >= in_.size()) return false;
        const uint8_t e = in_[pos_ + 1];
        if (e == 'u') {
          if (pos_ + 6 > in_.size()) return false;
          for (size_t i = pos_ + 2; i < pos_ + 6; ++i) {
            if (!std::isxdigit(in_[i])) return false;
          }
          pos_ += 6;
          continue;
        }
        if (e != '"' && e != '\\' && e != '/' && e != 'b' && e != 'f' &&
            e != 'n' && e != 'r' && e != 't') {
          return false;
        }
        pos_ += 2;
        continue;
      }
      if (c >= 0x80) {
        const size_t n = Utf8Length(in_, pos_);
        if (n == 0) return false;
        pos_ += n;
        continue;
      }
      ++pos_;
    }
    return false;
  }

  bool ParseNumber(Value& v) {
    const size_t start = pos_;
    Consume('-');
    if (AtEnd() || !std::isdigit(Peek())) return false;
    if (Peek() == '0') {
      ++pos_;
    } else {
      while (!AtEnd() && std::isdigit(Peek())) ++pos_;
    }
    if (!AtEnd() && Peek() == '.') {
      ++pos_;
      if (AtEnd() || !std::isdigit(Peek())) return false;
      while (!AtEnd() && std::isdigit(Peek())) ++pos_;
    }
    if (!AtEnd() && (Peek() == 'e' || Peek() == 'E')) {
      ++pos_;
      if (!AtEnd() && (Peek() == '+' || Peek() == '-')) ++pos_;
      if (AtEnd() || !std::isdigit(Peek())) return false;
      while (!AtEnd() && std::isdigit(Peek())) ++pos_;
    }
    v.type = Value::Type::kNumber;
    v.text.assign(in_.begin() + start, in_.begin() + pos_);
    Mark(start, pos_);
    return true;
  }

  bool ParseLiteral(Value& v, std::string_view word, Value::Type type) {
    if (in_.size() - pos_ < word.size()) return false;
    for (size_t i = 0; i < word.size(); ++i) {
      if (in_[pos_ + i] != static_cast<uint8_t>(word[i])) return false;
    }
    v.type = type;
    v.text = std::string(word);
    Mark(pos_, pos_ + word.size());
    pos_ += word.size();
    return true;
  }

  bool ParseValue(Value& v, int depth) {
    if (depth > 64 || AtEnd()) return false;
    switch (Peek()) {
      case '{': return ParseObject(v, depth + 1);
      case '[': return ParseArray(v, depth + 1);
      case '"':
        v.type = Value::Type::kString;
        return ParseString(v.text);
      case 't': return ParseLiteral(v, "true", Value::Type::kBool);
      case 'f': return ParseLiteral(v, "false", Value::Type::kBool);
      case 'n': return ParseLiteral(v, "null", Value::Type::kNull);
      default: return ParseNumber(v);
    }
  }

  // After "key:" a string followed by ':' starts the implicit object.
  bool ParseMemberValue(Value& v, int depth) {
    if (AtEnd() || Peek() != '"') return ParseValue(v, depth);
    std::string first;
    if (!ParseString(first)) return false;
    const size_t after_string = pos_;
    SkipSpace();
    if (AtEnd() || Peek() != ':') {
      pos_ = after_string;
      v.type = Value::Type::kString;
      v.text = std::move(first);
      return true;
    }
    v.type = Value::Type::kArray;
    v.lenient = true;
    std::string key = std::move(first);
    while (true) {
      SkipSpace();
      if (!Consume(':')) return false;
      SkipSpace();
      Value item;
      item.type = Value::Type::kObject;
      Value member;
      if (!ParseValue(member, depth + 1)) return false;
      item.members.emplace_back(std::move(key), std::move(member));
      v.items.push_back(std::move(item));
      SkipSpace();
      if (Consume('}')) return true;
      if (!Consume(',')) return false;
      SkipSpace();
      key.clear();
      if (!ParseString(key)) return false;
    }
  }

  bool ParseObject(Value& v, int depth = 0) {
    if (!Consume('{')) return false;
    v.type = Value::Type::kObject;
    SkipSpace();
    if (Consume('}')) return true;
    while (true) {
      SkipSpace();
      std::string key;
      if (!ParseString(key)) return false;
      SkipSpace();
      if (!Consume(':')) return false;
      SkipSpace();
      Value member;
      if (!ParseMemberValue(member, depth)) return false;
      v.members.emplace_back(std::move(key), std::move(member));
      SkipSpace();
      if (Consume('}')) return true;
      if (!Consume(',')) return false;
    }
  }

  bool ParseArray(Value& v, int depth) {
    if (!Consume('[')) return false;
    v.type = Value::Type::kArray;
    SkipSpace();
    if (Consume(']')) return true;
    while (true) {
      SkipSpace();
      Value item;
      if (!ParseValue(item, depth)) return false;
      v.items.push_back(std::move(item));
      SkipSpace();
      if (Consume(']')) return true;
      if (!Consume(',')) return false;
    }
  }

  const ByteArray& in_;
  size_t pos_ = 0;
  std::vector<uint8_t> mask_;
};

bool IsKeyByte(uint8_t c) {
  return std::isalnum(c) || c == '_' || c == '.' || c == '-';
}

}  // namespace

std::string TypeName(Value::Type type) {
  switch (type) {
    case Value::Type::kNull: return "null";
    case Value::Type::kBool: return "bool";
    case Value::Type::kNumber: return "number";
    case Value::Type::kString: return "string";
    case Value::Type::kObject: return "object";
    case Value::Type::kArray: return "array";
    case Value::Type::kBytes: return "bytes";
  }
  return "unknown";
}

std::string Value::Render() const {
  switch (type) {
    case Type::kNull: return "null";
    case Type::kBool:
    case Type::kNumber: return text;
    case Type::kString: return absl::StrCat("\"", text, "\"");
    case Type::kObject: {
      std::string out = "{";
      for (size_t i = 0; i < members.size(); ++i) {
        absl::StrAppend(&out, i ? "," : "", "\"", members[i].first,
                        "\":", members[i].second.Render());
      }
      return out + "}";
    }
    case Type::kArray: {
      std::string out = "[";
      for (size_t i = 0; i < items.size(); ++i) {
        absl::StrAppend(&out, i ? "," : "", items[i].Render());
      }
      return out + "]";
    }
    case Type::kBytes: {
      std::string out;
      for (char c : text) {
        absl::StrAppendFormat(&out, "%02x", static_cast<uint8_t>(c));
      }
      return out;
    }
  }
  return "";
}

const Value* Value::Member(const std::string& key) const {
  for (const auto& [k, v] : members) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::optional<ParsedInput> ParseJsonLike(const ByteArray& input) {
  return JsonLikeParser(input).Run();
}

// key=value pairs joined by '&'. Keys are [A-Za-z0-9_.-]+, values are
// printable ASCII without '&' or '=' and may be empty.
std::optional<ParsedInput> ParseKeyValue(const ByteArray& input) {
  if (input.empty()) return std::nullopt;
  ParsedInput out;
  out.data_mask.assign(input.size(), 0);
  size_t pos = 0;
  while (true) {
    const size_t key_start = pos;
    while (pos < input.size() && IsKeyByte(input[pos])) ++pos;
    if (pos == key_start || pos >= input.size() || input[pos] != '=') {
      return std::nullopt;
    }
    const size_t key_end = pos++;
    const size_t value_start = pos;
    while (pos < input.size() && input[pos] != '&') {
      const uint8_t c = input[pos];
      if (c < 0x21 || c > 0x7e || c == '=') return std::nullopt;
      ++pos;
    }
    Field field;
    field.key.assign(input.begin() + key_start, input.begin() + key_end);
    field.value.text.assign(input.begin() + value_start, input.begin() + pos);
    const std::string& t = field.value.text;
    bool numeric = !t.empty();
    for (size_t i = 0; i < t.size(); ++i) {
      if (!(std::isdigit(static_cast<uint8_t>(t[i])) || (i == 0 && t[i] == '-' && t.size() > 1))) {
        numeric = false;
      }
    }
    if (numeric) field.value.type = Value::Type::kNumber;
    else if (t == "true" || t == "false") field.value.type = Value::Type::kBool;
    else field.value.type = Value::Type::kString;
    for (size_t i = key_start; i < key_end; ++i) out.data_mask[i] = 1;
    for (size_t i = value_start; i < pos; ++i) out.data_mask[i] = 1;
    out.fields.push_back(std::move(field));
    if (pos == input.size()) break;
    ++pos;  // '&'
  }
  return out;
}

// [0x55][payload length][opcode][payload...]. The opcode is the command key,
// rendered as "0xNN".
std::optional<ParsedInput> ParseCustomByte(const ByteArray& input) {
  if (input.size() < 3 || input[0] != 0x55) return std::nullopt;
  if (input[1] != input.size() - 3) return std::nullopt;
  ParsedInput out;
  out.data_mask.assign(input.size(), 1);
  out.data_mask[0] = 0;
  out.data_mask[1] = 0;
  Field field;
  field.key = absl::StrFormat("0x%02x", input[2]);
  field.value.type = Value::Type::kBytes;
  field.value.text.assign(input.begin() + 3, input.end());
  out.fields.push_back(std::move(field));
  return out;
}

std::optional<ParsedInput> Parse(Grammar grammar, const ByteArray& input) {
  switch (grammar) {
    case Grammar::kJsonLike: return ParseJsonLike(input);
    case Grammar::kKeyValue: return ParseKeyValue(input);
    case Grammar::kCustomByte: return ParseCustomByte(input);
  }
  return std::nullopt;
}

}  // namespace snipfuzz::mock
