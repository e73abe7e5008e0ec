module.exports = function check(a, b, c) {
  if (a && b && c) return 1;
  if (a || b || c) return 2;
  if (c) return 6;
  return a ? (b ? 3 : 4) : c ?? 5;
};
