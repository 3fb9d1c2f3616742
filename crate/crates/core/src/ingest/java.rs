//! Lexical scanner for Java sources.
//!
//! Not a Java parser: it recognizes comments, `package`/`import`
//! statements, top-level type headers with their `extends`/`implements`
//! clauses, member declarations one brace level into a type body, local
//! variable declarations and `receiver.method(...)` call expressions. That
//! is enough to feed the feature extractors and a best-effort call resolver.

use std::collections::BTreeMap;
use std::path::Path;

use super::entity::{CodeEntity, MethodSig};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Sym(char),
    /// `...` varargs marker.
    Ellipsis,
    Literal,
    Comment(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
}

fn lex(src: &str) -> Vec<Token> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let n = chars.len();
    while i < n {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '/' && i + 1 < n && chars[i + 1] == '/' {
            let start = i + 2;
            while i < n && chars[i] != '\n' {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Comment(text.trim().to_string()),
                line,
            });
        } else if c == '/' && i + 1 < n && chars[i + 1] == '*' {
            let start_line = line;
            let start = i + 2;
            i += 2;
            while i < n && !(chars[i] == '*' && i + 1 < n && chars[i + 1] == '/') {
                if chars[i] == '\n' {
                    line += 1;
                }
                i += 1;
            }
            let end = i.min(n);
            i = (i + 2).min(n);
            let raw: String = chars[start..end].iter().collect();
            out.push(Token {
                tok: Tok::Comment(clean_block_comment(&raw)),
                line: start_line,
            });
        } else if c == '"' {
            let start_line = line;
            if i + 2 < n && chars[i + 1] == '"' && chars[i + 2] == '"' {
                // text block
                i += 3;
                while i < n && !(chars[i] == '"' && i + 2 < n && chars[i + 1] == '"' && chars[i + 2] == '"') {
                    if chars[i] == '\n' {
                        line += 1;
                    }
                    i += 1;
                }
                i = (i + 3).min(n);
            } else {
                i += 1;
                while i < n && chars[i] != '"' && chars[i] != '\n' {
                    if chars[i] == '\\' {
                        i += 1;
                    }
                    i += 1;
                }
                i = (i + 1).min(n);
            }
            out.push(Token {
                tok: Tok::Literal,
                line: start_line,
            });
        } else if c == '\'' {
            i += 1;
            while i < n && chars[i] != '\'' && chars[i] != '\n' {
                if chars[i] == '\\' {
                    i += 1;
                }
                i += 1;
            }
            i = (i + 1).min(n);
            out.push(Token {
                tok: Tok::Literal,
                line,
            });
        } else if c.is_ascii_digit() {
            while i < n && (chars[i].is_alphanumeric() || chars[i] == '.' || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Literal,
                line,
            });
        } else if c.is_alphabetic() || c == '_' || c == '$' {
            let start = i;
            while i < n && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line,
            });
        } else if c == '.' && i + 2 < n && chars[i + 1] == '.' && chars[i + 2] == '.' {
            i += 3;
            out.push(Token {
                tok: Tok::Ellipsis,
                line,
            });
        } else {
            i += 1;
            out.push(Token { tok: Tok::Sym(c), line });
        }
    }
    out
}

fn clean_block_comment(raw: &str) -> String {
    raw.lines()
        .map(|l| l.trim().trim_start_matches('*').trim())
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

const MODIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "default",
    "synchronized",
    "native",
    "transient",
    "volatile",
    "strictfp",
    "sealed",
    "non",
];

const NOT_TYPES: &[&str] = &[
    "return",
    "new",
    "throw",
    "else",
    "case",
    "package",
    "import",
    "yield",
    "instanceof",
    "this",
    "super",
    "goto",
    "break",
    "continue",
    "assert",
];

const TYPE_KEYWORDS: &[&str] = &["class", "interface", "enum", "record"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeKind {
    Class,
    Interface,
    Enum,
    Record,
}

/// A `receiver.method(args)` expression inside a method body. `receiver` is
/// the identifier immediately left of the dot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallSite {
    pub receiver: String,
    pub method: String,
    pub arg_count: usize,
    pub line: usize,
}

/// A top-level type with its raw call sites and a flat identifier -> type
/// table (fields, parameters and locals) used to resolve receivers.
#[derive(Debug, Clone)]
pub struct ParsedType {
    pub entity: CodeEntity,
    pub kind: TypeKind,
    pub imports: Vec<String>,
    pub call_sites: Vec<CallSite>,
    pub var_types: BTreeMap<String, String>,
}

fn ident(t: &Token) -> Option<&str> {
    match &t.tok {
        Tok::Ident(s) => Some(s),
        _ => None,
    }
}

fn is_sym(t: &Token, c: char) -> bool {
    t.tok == Tok::Sym(c)
}

/// Base type name of a type expression: `java.util.List<Order>[]` -> `List`.
fn base_type(tokens: &[Token]) -> Option<String> {
    let mut last = None;
    for t in tokens {
        match &t.tok {
            Tok::Ident(s) => last = Some(s.clone()),
            Tok::Sym('.') => {}
            _ => break,
        }
    }
    last
}

fn type_text(tokens: &[Token]) -> String {
    let mut s = String::new();
    for t in tokens {
        match &t.tok {
            Tok::Ident(x) => {
                if s.chars().last().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    s.push(' ');
                }
                s.push_str(x);
            }
            Tok::Sym(c) => s.push(*c),
            Tok::Ellipsis => s.push_str("..."),
            _ => {}
        }
    }
    s
}

/// Drops `@Annotation` and `@Annotation(...)` tokens.
fn strip_annotations(tokens: &[Token]) -> Vec<Token> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        if is_sym(&tokens[i], '@') && tokens.get(i + 1).and_then(ident) != Some("interface") {
            i += 1;
            while i < tokens.len() && (ident(&tokens[i]).is_some() || is_sym(&tokens[i], '.')) {
                i += 1;
                if i < tokens.len() && is_sym(&tokens[i - 1], '.') {
                    continue;
                }
                if i < tokens.len() && !is_sym(&tokens[i], '.') {
                    break;
                }
            }
            if i < tokens.len() && is_sym(&tokens[i], '(') {
                let mut depth = 0;
                while i < tokens.len() {
                    if is_sym(&tokens[i], '(') {
                        depth += 1;
                    } else if is_sym(&tokens[i], ')') {
                        depth -= 1;
                        if depth == 0 {
                            i += 1;
                            break;
                        }
                    }
                    i += 1;
                }
            }
        } else {
            out.push(tokens[i].clone());
            i += 1;
        }
    }
    out
}

/// Splits on commas that are not nested inside `<>`, `()` or `[]`.
fn split_top_level_commas(tokens: &[Token]) -> Vec<&[Token]> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, t) in tokens.iter().enumerate() {
        match t.tok {
            Tok::Sym('<') | Tok::Sym('(') | Tok::Sym('[') => depth += 1,
            Tok::Sym('>') | Tok::Sym(')') | Tok::Sym(']') => depth -= 1,
            Tok::Sym(',') if depth == 0 => {
                parts.push(&tokens[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if start < tokens.len() {
        parts.push(&tokens[start..]);
    }
    parts
}

/// Skips a balanced `<...>` starting at `i` (which must point at `<`).
fn skip_angles(tokens: &[Token], mut i: usize) -> usize {
    let mut depth = 0;
    while i < tokens.len() {
        if is_sym(&tokens[i], '<') {
            depth += 1;
        } else if is_sym(&tokens[i], '>') {
            depth -= 1;
            if depth == 0 {
                return i + 1;
            }
        }
        i += 1;
    }
    i
}

struct TypeHeader {
    kind: TypeKind,
    name: String,
    parents: Vec<String>,
}

/// Parses `class Name<..> extends A implements B, C` from the tokens between
/// the type keyword and the opening brace.
fn parse_header(kind: TypeKind, tokens: &[Token]) -> Option<TypeHeader> {
    let name = tokens.first().and_then(ident)?.to_string();
    let mut parents = Vec::new();
    let mut i = 1;
    let mut in_clause = false;
    while i < tokens.len() {
        let t = &tokens[i];
        if is_sym(t, '<') {
            // type parameters, or generic arguments of a parent type
            i = skip_angles(tokens, i);
            continue;
        }
        if is_sym(t, '(') {
            // record components
            let mut depth = 0;
            while i < tokens.len() {
                if is_sym(&tokens[i], '(') {
                    depth += 1;
                } else if is_sym(&tokens[i], ')') {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                i += 1;
            }
            i += 1;
            continue;
        }
        match ident(t) {
            Some("extends") | Some("implements") => in_clause = true,
            Some("permits") => in_clause = false,
            Some(s) if in_clause => {
                // keep the simple name of a qualified parent
                let qualified_continues = tokens.get(i + 1).is_some_and(|n| is_sym(n, '.'));
                if !qualified_continues {
                    parents.push(s.to_string());
                }
            }
            _ => {}
        }
        i += 1;
    }
    Some(TypeHeader { kind, name, parents })
}

struct Builder {
    parsed: ParsedType,
    enum_constants_pending: bool,
}

/// Scans one compilation unit and returns its top-level types.
pub fn parse_java(src: &str, path: Option<&Path>) -> Vec<ParsedType> {
    let tokens = lex(src);
    let mut out: Vec<ParsedType> = Vec::new();
    let mut package = String::new();
    let mut imports = Vec::new();
    let mut pending_comments: Vec<String> = Vec::new();
    let mut current: Option<Builder> = None;
    let mut depth = 0usize;
    let mut member: Vec<Token> = Vec::new();
    // set while skipping a field initializer up to its `;`
    let mut skipping_initializer = false;
    let mut decl_prefix: Vec<Token> = Vec::new();
    let mut init_parens = 0i32;
    let mut init_angles = 0i32;

    let mut i = 0;
    while i < tokens.len() {
        let t = &tokens[i];
        if let Tok::Comment(text) = &t.tok {
            if !text.is_empty() {
                match current.as_mut() {
                    Some(b) if depth >= 1 => b.parsed.entity.comments.push(text.clone()),
                    _ => pending_comments.push(text.clone()),
                }
            }
            i += 1;
            continue;
        }

        if depth == 0 {
            match ident(t) {
                Some("package") => {
                    let (name, next) = read_qualified(&tokens, i + 1);
                    package = name;
                    i = next;
                    continue;
                }
                Some("import") => {
                    let (name, next) = read_qualified(&tokens, i + 1);
                    imports.push(name);
                    i = next;
                    continue;
                }
                Some(kw) if TYPE_KEYWORDS.contains(&kw) && !prev_is_dot(&tokens, i) => {
                    let kind = match kw {
                        "class" => TypeKind::Class,
                        "interface" => TypeKind::Interface,
                        "enum" => TypeKind::Enum,
                        _ => TypeKind::Record,
                    };
                    let mut j = i + 1;
                    while j < tokens.len() && !is_sym(&tokens[j], '{') {
                        j += 1;
                    }
                    let header: Vec<Token> = tokens[i + 1..j]
                        .iter()
                        .filter(|t| !matches!(t.tok, Tok::Comment(_)))
                        .cloned()
                        .collect();
                    if let Some(h) = parse_header(kind, &header) {
                        let mut entity = CodeEntity::new(0, h.name.clone(), package.clone());
                        entity.source = path.map(Path::to_path_buf);
                        entity.line = t.line;
                        entity.comments = std::mem::take(&mut pending_comments);
                        for p in h.parents {
                            if p != h.name {
                                entity.inheritance_raw.insert(p);
                            }
                        }
                        current = Some(Builder {
                            parsed: ParsedType {
                                entity,
                                kind: h.kind,
                                imports: imports.clone(),
                                call_sites: Vec::new(),
                                var_types: BTreeMap::new(),
                            },
                            enum_constants_pending: h.kind == TypeKind::Enum,
                        });
                    }
                    depth = 1;
                    member.clear();
                    skipping_initializer = false;
                    i = j + 1;
                    continue;
                }
                _ => {}
            }
            i += 1;
            continue;
        }

        // inside a type body
        match t.tok {
            Tok::Sym('{') => {
                if depth == 1 {
                    if let Some(b) = current.as_mut() {
                        if !b.enum_constants_pending && !skipping_initializer {
                            b.member_declaration(&member);
                        }
                    }
                    member.clear();
                }
                depth += 1;
            }
            Tok::Sym('}') => {
                depth -= 1;
                if depth == 0 {
                    if let Some(b) = current.take() {
                        out.push(b.parsed);
                    }
                    member.clear();
                    skipping_initializer = false;
                } else if depth == 1 {
                    member.clear();
                }
            }
            Tok::Sym(';') if depth == 1 => {
                if let Some(b) = current.as_mut() {
                    if b.enum_constants_pending {
                        b.enum_constants_pending = false;
                    } else if !skipping_initializer {
                        b.member_declaration(&member);
                    }
                }
                member.clear();
                skipping_initializer = false;
            }
            Tok::Sym('=') if depth == 1 => {
                if let Some(b) = current.as_mut() {
                    if !b.enum_constants_pending && !skipping_initializer {
                        b.member_declaration(&member);
                    }
                }
                if !skipping_initializer {
                    // modifiers and type of the first declarator, reused for `, NEXT`
                    decl_prefix = split_top_level_commas(&member)
                        .first()
                        .map(|p| p[..p.len().saturating_sub(1)].to_vec())
                        .unwrap_or_default();
                    init_parens = 0;
                    init_angles = 0;
                }
                member.clear();
                skipping_initializer = true;
            }
            _ if depth == 1 => {
                if !skipping_initializer {
                    member.push(t.clone());
                } else {
                    match t.tok {
                        Tok::Sym('(') | Tok::Sym('[') => init_parens += 1,
                        Tok::Sym(')') | Tok::Sym(']') => init_parens -= 1,
                        // generic arguments such as `new HashMap<K, V>()`
                        Tok::Sym('<')
                            if tokens.get(i + 1).is_some_and(|n| {
                                is_sym(n, '>') || ident(n).is_some_and(|s| s.starts_with(char::is_uppercase))
                            }) =>
                        {
                            init_angles += 1
                        }
                        Tok::Sym('>') if init_angles > 0 => init_angles -= 1,
                        Tok::Sym(',') if init_parens == 0 && init_angles == 0 => {
                            member = decl_prefix.clone();
                            skipping_initializer = false;
                        }
                        _ => {}
                    }
                }
            }
            _ => {
                if let Some(b) = current.as_mut() {
                    b.body_token(&tokens, i);
                }
            }
        }
        i += 1;
    }
    if let Some(b) = current.take() {
        out.push(b.parsed);
    }
    out
}

fn prev_is_dot(tokens: &[Token], i: usize) -> bool {
    i > 0 && is_sym(&tokens[i - 1], '.')
}

fn read_qualified(tokens: &[Token], mut i: usize) -> (String, usize) {
    let mut name = String::new();
    while i < tokens.len() && !is_sym(&tokens[i], ';') {
        match &tokens[i].tok {
            Tok::Ident(s) if s != "static" => name.push_str(s),
            Tok::Sym('.') => name.push('.'),
            Tok::Sym('*') => name.push('*'),
            _ => {}
        }
        i += 1;
    }
    (name, i + 1)
}

impl Builder {
    fn is_interface(&self) -> bool {
        self.parsed.kind == TypeKind::Interface
    }

    /// Handles one member declaration collected at brace depth 1.
    fn member_declaration(&mut self, raw: &[Token]) {
        let tokens = strip_annotations(raw);
        if tokens.is_empty() {
            return;
        }
        if tokens
            .iter()
            .any(|t| ident(t).is_some_and(|s| TYPE_KEYWORDS.contains(&s)))
        {
            return; // nested type
        }
        let mut k = 0;
        let mut is_public = false;
        let mut is_private = false;
        while k < tokens.len() {
            match ident(&tokens[k]) {
                Some("public") => is_public = true,
                Some("private") => is_private = true,
                Some(m) if MODIFIERS.contains(&m) => {}
                // `non-sealed`
                _ if is_sym(&tokens[k], '-') => {}
                _ => break,
            }
            k += 1;
        }
        let public = is_public || (self.is_interface() && !is_private);
        let rest = &tokens[k..];
        if rest.is_empty() {
            return;
        }

        if let Some(paren) = rest.iter().position(|t| is_sym(t, '(')) {
            self.method_declaration(rest, paren, public);
        } else {
            for (idx, part) in split_top_level_commas(rest).into_iter().enumerate() {
                let name_pos = part.iter().rposition(|t| ident(t).is_some());
                let Some(p) = name_pos else { continue };
                let name = ident(&part[p]).unwrap().to_string();
                if idx == 0 {
                    if let Some(ty) = base_type(&part[..p]) {
                        self.parsed.var_types.insert(name.clone(), ty);
                    }
                }
                if public {
                    self.parsed.entity.public_variables.push(name);
                }
            }
        }
    }

    fn method_declaration(&mut self, rest: &[Token], paren: usize, public: bool) {
        if paren == 0 {
            return;
        }
        let Some(name) = ident(&rest[paren - 1]) else { return };
        let mut ty_start = 0;
        if is_sym(&rest[0], '<') {
            ty_start = skip_angles(rest, 0);
        }
        let ret_tokens = &rest[ty_start..paren - 1];
        // parameters
        let mut depth = 0;
        let mut close = paren;
        for (j, t) in rest.iter().enumerate().skip(paren) {
            if is_sym(t, '(') {
                depth += 1;
            } else if is_sym(t, ')') {
                depth -= 1;
                if depth == 0 {
                    close = j;
                    break;
                }
            }
        }
        let mut params = Vec::new();
        if close > paren + 1 {
            for part in split_top_level_commas(&rest[paren + 1..close]) {
                let part: Vec<Token> = part.iter().filter(|t| ident(t) != Some("final")).cloned().collect();
                let part = strip_annotations(&part);
                let Some(p) = part.iter().rposition(|t| ident(t).is_some()) else {
                    continue;
                };
                let pname = ident(&part[p]).unwrap().to_string();
                if let Some(ty) = base_type(&part[..p]) {
                    self.parsed.var_types.insert(pname, ty);
                }
                params.push(type_text(&part[..p]));
            }
        }
        let is_constructor = ret_tokens.is_empty() || name == self.parsed.entity.name;
        if public && !is_constructor {
            self.parsed.entity.public_methods.push(MethodSig {
                name: name.to_string(),
                param_types: params,
                return_type: type_text(ret_tokens),
            });
        }
    }

    /// Looks at a token inside a method body for declarations and calls.
    fn body_token(&mut self, tokens: &[Token], i: usize) {
        let Some(name) = ident(&tokens[i]) else { return };
        let next = tokens.get(i + 1);

        // `Type name =|;|:|)|,` declarations
        if i > 0 {
            if let Some(ty) = ident(&tokens[i - 1]) {
                let ends_decl = next.is_some_and(|n| {
                    matches!(
                        n.tok,
                        Tok::Sym('=') | Tok::Sym(';') | Tok::Sym(':') | Tok::Sym(')') | Tok::Sym(',')
                    )
                });
                if ends_decl
                    && !NOT_TYPES.contains(&ty)
                    && !MODIFIERS.contains(&ty)
                    && ty.chars().next().is_some_and(char::is_uppercase)
                {
                    self.parsed.var_types.insert(name.to_string(), ty.to_string());
                }
            }
        }

        // receiver.method(
        if next.is_some_and(|n| is_sym(n, '(')) && i >= 2 && is_sym(&tokens[i - 1], '.') {
            if let Some(receiver) = ident(&tokens[i - 2]) {
                if receiver == "this" || receiver == "super" {
                    return;
                }
                self.parsed.call_sites.push(CallSite {
                    receiver: receiver.to_string(),
                    method: name.to_string(),
                    arg_count: count_args(tokens, i + 1),
                    line: tokens[i].line,
                });
            }
        }
    }
}

fn count_args(tokens: &[Token], open: usize) -> usize {
    let mut depth = 0;
    let mut commas = 0;
    let mut any = false;
    for t in &tokens[open..] {
        match t.tok {
            Tok::Sym('(') | Tok::Sym('[') | Tok::Sym('{') => {
                depth += 1;
                if depth > 1 {
                    any = true;
                }
            }
            Tok::Sym(')') | Tok::Sym(']') | Tok::Sym('}') => {
                depth -= 1;
                if depth == 0 {
                    break;
                }
            }
            Tok::Sym(',') if depth == 1 => commas += 1,
            Tok::Comment(_) => {}
            _ => any = true,
        }
    }
    if any {
        commas + 1
    } else {
        0
    }
}
