function* gen() {
  yield 1;
}
async function load() {
  await gen();
}
const expr = function named() {};
export default function () {}
