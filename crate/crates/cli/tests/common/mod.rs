/// Adds two little-endian binary words with shell arithmetic.
pub const SH_ADDER: &str = r#"read a; read b
v() { w=$1; n=0; p=1; [ "$w" = e ] && w=""
  while [ -n "$w" ]; do c=${w%"${w#?}"}; w=${w#?}; n=$((n + c * p)); p=$((p * 2)); done
  echo $n; }
s=$(( $(v "$a") + $(v "$b") ))
out=""; [ $s -eq 0 ] && out=0
while [ $s -gt 0 ]; do out="$out$((s % 2))"; s=$((s / 2)); done
echo $out
"#;
