#include <stdio.h>
struct Rect {
    int hi;
    int x;
};
int update(struct Rect val, struct Rect pos)
{
    int mid = val.hi - pos.hi;
    mid = mid + val.x - pos.x;
    return mid;
}
int main(void)
{
    struct Rect val;
    struct Rect pos;
    val.hi = 20;
    val.x = 2;
    pos.hi = 3;
    pos.x = 12;
    printf("%d\n", update(val, pos));
    return 0;
}
