function parse(text) {
  try {
    return JSON.parse(text);
  } catch (err) {
    return null;
  } finally {
    cleanup();
  }
}
function cleanup() {}
