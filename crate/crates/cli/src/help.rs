pub const SYNTAX_HELP: &str = "\
Expressions (variables x1..xn, 1-based):
  expr  := term (('+' | '-') term)*
  term  := power (('*' | '/') power)*
  power := unary ('^' power)?
  unary := '-'? atom
  atom  := number | xK | '(' expr ')' | call
  call  := abs(e) | floor(e) | ceil(e) | round(e)
         | min(a, b) | max(a, b) | pow(a, b) | clamp(v, lo, hi)
         | mean(e, ...) | median(e, ...)

Domains:
  R, Z                  all reals, all integers
  real[a,b]  real(a,b)  interval; brackets choose closed or open ends
  int[a..b]             integers a through b
  set{v1, v2, ...}      finite set
  D^n                   n-fold power, e.g. R^3
  D1 x D2 x ...         mixed product, e.g. real[0,1] x int[0..9]

Exit codes: 0 holds, 1 fails, 2 undefined, 3 usage or input error.
";
