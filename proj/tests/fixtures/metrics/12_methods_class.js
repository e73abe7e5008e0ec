class Stack {
  constructor() {
    this.items = [];
  }
  push(x) {
    this.items.push(x);
  }
  get size() {
    return this.items.length;
  }
  static from(list) {
    const s = new Stack();
    list.forEach((x) => s.push(x));
    return s;
  }
}
module.exports = Stack;
