#include <stdio.h>
struct Point {
    int right;
    int y;
};
int blend(struct Point prev, struct Point pos)
{
    int num = prev.right - pos.right;
    num = num + prev.y - pos.y;
    return num;
}
int main(void)
{
    struct Point prev;
    struct Point pos;
    prev.right = 17;
    prev.y = 2;
    pos.right = 16;
    pos.y = 2;
    printf("%d\n", blend(prev, pos));
    return 0;
}
